"""
Chart rendering
Отрисовка диаграмм

Each connected component gets a barycentric (Tutte) layout on its
vertex-face incidence graph: the vertices of the face cycle lying in the
infinite region are pinned on a circle and every other vertex and face
point sits at the average of its neighbours. Components are laid out side
by side and written as a standalone SVG document.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from chart import Chart, VertexKind, inward_run
from structure import is_middle

logger = logging.getLogger(__name__)

Point = Tuple[float, float]

SCALE = 110.0
MARGIN = 50.0
COMPONENT_GAP = 2.8
LABEL_COLORS = ('#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b', '#e377c2', '#17becf')


@dataclass
class Layout:
    """Positions in layout units: vertices and interior face cycles"""
    vertices: Dict[int, Point] = field(default_factory=dict)
    faces: Dict[int, Point] = field(default_factory=dict)
    outer: Dict[int, int] = field(default_factory=dict)    # component -> pinned face cycle


def _outer_cycle(chart: Chart, cycles: List[int]) -> int:
    at_infinity = [c for c in cycles if chart.region_of_cycle[c] == chart.infinity_face]
    pool = at_infinity or cycles
    return max(pool, key=lambda c: (len(chart.face_cycles[c]), -c))


def _ring(count: int) -> List[Point]:
    if count == 1:
        return [(0.0, 0.0)]
    return [(math.cos(2 * math.pi * i / count), math.sin(2 * math.pi * i / count)) for i in range(count)]


def _component_layout(chart: Chart, vertices: List[int]) -> Tuple[Dict[int, Point], Dict[int, Point], int]:
    darts = [d for v in vertices for d in chart.vertices[v]]
    cycles = sorted({chart.cycle_of[d] for d in darts})
    outer = _outer_cycle(chart, cycles)

    ring: List[int] = []
    for d in chart.face_cycles[outer]:
        v = chart.vertex_of[d]
        if v not in ring:
            ring.append(v)
    pinned = dict(zip(ring, _ring(len(ring))))

    nodes = [('v', v) for v in vertices if v not in pinned] + [('f', c) for c in cycles if c != outer]
    index = {node: i for i, node in enumerate(nodes)}
    size = len(nodes)
    A = np.zeros((size, size))
    B = np.zeros((size, 2))

    def neighbours(node):
        kind, x = node
        if kind == 'v':
            for d in chart.vertices[x]:
                yield 'v', chart.vertex_of[chart.alpha(d)]
                yield 'f', chart.cycle_of[d]
        else:
            for d in chart.face_cycles[x]:
                yield 'v', chart.vertex_of[d]

    for node, i in index.items():
        for other in neighbours(node):
            if other == ('f', outer) or other == node:
                continue
            A[i, i] += 1
            if other in index:
                A[i, index[other]] -= 1
            else:
                B[i] += pinned[other[1]]

    solution = np.zeros((size, 2))
    if size:
        try:
            solution = np.linalg.solve(A, B)
        except np.linalg.LinAlgError:
            logger.warning("Singular layout system, falling back to least squares")
            solution = np.linalg.lstsq(A, B, rcond=None)[0]

    placed = {v: p for v, p in pinned.items()}
    faces: Dict[int, Point] = {}
    for (kind, x), i in index.items():
        point = (float(solution[i, 0]), float(solution[i, 1]))
        if kind == 'v':
            placed[x] = point
        else:
            faces[x] = point
    return placed, faces, outer


def tutte_layout(chart: Chart) -> Layout:
    """Barycentric layout, one unit disk per component, components left to right"""
    layout = Layout()
    by_component: Dict[int, List[int]] = {}
    for v in range(len(chart.vertices)):
        by_component.setdefault(chart.component_of_vertex[v], []).append(v)
    for offset, (component, vertices) in enumerate(sorted(by_component.items())):
        placed, faces, outer = _component_layout(chart, vertices)
        shift = offset * COMPONENT_GAP
        layout.vertices.update({v: (x + shift, y) for v, (x, y) in placed.items()})
        layout.faces.update({c: (x + shift, y) for c, (x, y) in faces.items()})
        layout.outer[component] = outer
    logger.debug(f"Laid out {len(by_component)} components")
    return layout


class SvgCanvas:
    """Minimal SVG writer in layout units"""

    def __init__(self, width: float, height: float):
        self.width = width
        self.height = height
        self.parts: List[str] = []

    def window(self, point: Point) -> Point:
        x, y = point
        return MARGIN + x * SCALE, self.height - MARGIN - y * SCALE

    def header(self) -> str:
        return (f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                f'width="{self.width:.0f}" height="{self.height:.0f}" '
                f'viewBox="0 0 {self.width:.0f} {self.height:.0f}">\n'
                '<defs><marker id="arrow" viewBox="0 0 10 10" refX="5" refY="5" markerWidth="7" '
                'markerHeight="7" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#333"/></marker></defs>\n')

    def polyline(self, points: List[Point], color: str, arrow: bool, title: str):
        coords = ' '.join(f'{x:.2f},{y:.2f}' for x, y in (self.window(p) for p in points))
        mid = ' marker-mid="url(#arrow)"' if arrow else ''
        self.parts.append(f'<polyline class="edge" points="{coords}" fill="none" stroke="{color}" '
                          f'stroke-width="2"{mid}><title>{title}</title></polyline>')

    def line(self, a: Point, b: Point, color: str = '#333', width: float = 1.5):
        (x1, y1), (x2, y2) = self.window(a), self.window(b)
        self.parts.append(f'<line class="tick" x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                          f'stroke="{color}" stroke-width="{width}"/>')

    def vertex(self, point: Point, kind: VertexKind):
        x, y = self.window(point)
        if kind is VertexKind.WHITE:
            self.parts.append(f'<circle class="white" cx="{x:.2f}" cy="{y:.2f}" r="7" fill="#fff" stroke="#000" '
                              'stroke-width="1.5"/>')
        elif kind is VertexKind.BLACK:
            self.parts.append(f'<circle class="black" cx="{x:.2f}" cy="{y:.2f}" r="5" fill="#000"/>')
        elif kind is VertexKind.CROSSING:
            self.parts.append(f'<rect class="crossing" x="{x - 3:.2f}" y="{y - 3:.2f}" width="6" height="6" '
                              'fill="#888"/>')
        else:
            self.parts.append(f'<circle class="{kind.value}" cx="{x:.2f}" cy="{y:.2f}" r="2" fill="#888"/>')

    def text(self, string: str, point: Point):
        x, y = self.window(point)
        self.parts.append(f'<text x="{x + 4:.2f}" y="{y - 4:.2f}" font-size="11" font-family="sans-serif">'
                          f'{string}</text>')

    def document(self) -> str:
        return self.header() + '\n'.join(self.parts) + '\n</svg>\n'


def _mix(a: Point, b: Point, t: float) -> Point:
    return a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t


def _edge_points(chart: Chart, layout: Layout, first: int, second: int) -> List[Point]:
    """Polyline from the vertex of `first` to the vertex of `second`, bent towards the side faces"""
    u, v = layout.vertices[chart.vertex_of[first]], layout.vertices[chart.vertex_of[second]]
    sides = [layout.faces[c] for c in (chart.cycle_of[first], chart.cycle_of[second]) if c in layout.faces]
    middle = _mix(u, v, 0.5)
    if chart.vertex_of[first] == chart.vertex_of[second]:
        # loop or hoop: a small circle on the side of an interior face
        toward = sides[0] if sides else (u[0] + 0.3, u[1])
        centre = _mix(u, toward, 0.5)
        radius = max(math.dist(u, centre), 0.12)
        start = math.atan2(u[1] - centre[1], u[0] - centre[0])
        return [(centre[0] + radius * math.cos(start + 2 * math.pi * i / 16),
                 centre[1] + radius * math.sin(start + 2 * math.pi * i / 16)) for i in range(17)]
    if len(sides) == 2:
        bend = _mix(sides[0], sides[1], 0.5)
        middle = _mix(middle, bend, 0.35)
    elif len(sides) == 1:
        # the other side is the pinned outer face: push away from the interior one
        middle = _mix(middle, sides[0], -0.25)
    return [u, middle, v]


def render_svg(chart: Chart, layout: Optional[Layout] = None) -> str:
    """SVG text: one polyline per edge, one marker per vertex, label annotations and middle ticks"""
    layout = layout or tutte_layout(chart)
    xs = [p[0] for p in layout.vertices.values()] or [0.0]
    ys = [p[1] for p in layout.vertices.values()] or [0.0]
    shift = (-min(xs) + 0.4, -min(ys) + 0.4)
    layout.vertices = {v: (x + shift[0], y + shift[1]) for v, (x, y) in layout.vertices.items()}
    layout.faces = {c: (x + shift[0], y + shift[1]) for c, (x, y) in layout.faces.items()}
    width = (max(xs) - min(xs) + 0.8) * SCALE + 2 * MARGIN
    height = (max(ys) - min(ys) + 0.8) * SCALE + 2 * MARGIN
    canvas = SvgCanvas(width, height)

    for edge in chart.edges:
        first, second = (edge.tail, edge.head) if edge.head is not None else edge.darts
        points = _edge_points(chart, layout, first, second)
        color = LABEL_COLORS[(edge.label - 1) % len(LABEL_COLORS)]
        canvas.polyline(points, color, arrow=edge.head is not None, title=f"label {edge.label}")
        canvas.text(str(edge.label), points[len(points) // 2])

    for v, rotation in enumerate(chart.vertices):
        kind = chart.kinds[v]
        canvas.vertex(layout.vertices[v], kind)
        if kind is not VertexKind.WHITE or inward_run([bool(chart.is_inward(d)) for d in rotation]) is None:
            continue
        for d in rotation:
            if is_middle(chart, d):
                other = layout.vertices[chart.vertex_of[chart.alpha(d)]]
                canvas.line(_mix(layout.vertices[v], other, 0.12), _mix(layout.vertices[v], other, 0.2))

    logger.debug(f"Rendered {len(chart.edges)} edges and {len(chart.vertices)} vertices")
    return canvas.document()


def save_svg(chart: Chart, path: str):
    with open(path, 'w', encoding='utf-8') as fh:
        fh.write(render_svg(chart))
    logger.info(f"Wrote {path}")
