"""
Chart Data Model on the 2-Sphere
Модель диаграммы (chart) на двумерной сфере

A chart is an oriented labeled graph embedded in S^2. It is stored as a
combinatorial map: darts (half-edges) numbered 0..2E-1, the `opposite`
involution pairing the two darts of each edge, and one counter-clockwise
rotation per vertex. Faces are the cycles of the face permutation
phi(d) = sigma(opposite(d)); the face of a dart is the one on its right-hand
side when walking away from its vertex.

When the graph is disconnected a face of the sphere ("region") is bounded by
several boundary cycles, so the model keeps an explicit region table; each
region lists the minimum dart of every boundary cycle it contains. One region
holds the point at infinity.

Closed edges (hoops) are a dart pair that forms its own degree-2 "marker"
vertex. Charts are immutable values; every surgery goes through
`editor.ChartEditor`.
"""

import json
import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Any, Dict, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from errors import ChartFormatError, ChartValidationError

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


class VertexKind(Enum):
    """Vertex kind, determined by degree"""
    BLACK = 'black'
    CROSSING = 'crossing'
    WHITE = 'white'
    MARKER = 'marker'      # hoop marker: degree 2, darts of one closed edge
    JOINT = 'joint'        # degree 2 otherwise (partial charts, BW-vertices)
    BRANCH = 'branch'      # degree 3 (skeletons and patterns)
    INVALID = 'invalid'


@dataclass(frozen=True)
class Edge:
    """An edge: its two darts (sorted), label and head dart (None if unoriented)"""
    darts: Tuple[int, int]
    label: int
    head: Optional[int]

    @property
    def tail(self) -> Optional[int]:
        if self.head is None:
            return None
        return self.darts[1] if self.head == self.darts[0] else self.darts[0]

    def to_dict(self) -> Dict[str, Any]:
        return {'darts': list(self.darts), 'label': self.label, 'head': self.head}


@dataclass(frozen=True)
class Violation:
    """One failed axiom or assumption"""
    code: str
    message: str
    darts: Tuple[int, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {'code': self.code, 'message': self.message, 'darts': list(self.darts)}


@dataclass
class ValidationReport:
    """List of violations; empty means the chart passed"""
    violations: List[Violation] = field(default_factory=list)
    strict: bool = False

    @property
    def is_valid(self) -> bool:
        return not self.violations

    @property
    def codes(self) -> Set[str]:
        return {v.code for v in self.violations}

    def add(self, code: str, message: str, darts: Iterable[int] = ()):
        self.violations.append(Violation(code, message, tuple(darts)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'valid': self.is_valid,
            'strict': self.strict,
            'violations': [v.to_dict() for v in self.violations],
        }


@dataclass(frozen=True, order=True)
class Measures:
    """Global counts; ordering is lexicographic on the complexity (w, -f)"""
    complexity: Tuple[int, int]
    w: int = field(compare=False)
    f: int = field(compare=False)
    c: int = field(compare=False)
    b: int = field(compare=False, default=0)

    @classmethod
    def of(cls, w: int, f: int, c: int, b: int = 0) -> 'Measures':
        return cls(complexity=(w, -f), w=w, f=f, c=c, b=b)

    def to_dict(self) -> Dict[str, Any]:
        return {'w': self.w, 'f': self.f, 'c': self.c, 'b': self.b,
                'complexity': list(self.complexity)}


@dataclass(frozen=True)
class ChartType:
    """Type (m; n_1, ..., n_k) of a chart"""
    m: int
    counts: Tuple[int, ...]

    def __str__(self) -> str:
        return f"({self.m}; {', '.join(str(c) for c in self.counts)})"


def structural_violations(n: Any, opposite: Sequence[Any], vertices: Sequence[Sequence[Any]],
                          edges: Sequence[Any]) -> List[Violation]:
    """Check that the raw arrays form a combinatorial map"""
    problems: List[Violation] = []
    if not isinstance(n, int) or n < 1:
        problems.append(Violation('structure', f"braid degree must be a positive integer, got {n!r}"))
    size = len(opposite)
    for d, o in enumerate(opposite):
        if not isinstance(o, int) or not 0 <= o < size:
            problems.append(Violation('structure', f"opposite of dart {d} out of range", (d,)))
        elif o == d or opposite[o] != d:
            problems.append(Violation('structure', f"opposite is not a fixed-point-free involution at {d}", (d,)))
    seen: Dict[int, int] = {}
    for index, rotation in enumerate(vertices):
        if not rotation:
            problems.append(Violation('structure', f"vertex {index} has an empty rotation"))
        for d in rotation:
            if not isinstance(d, int) or not 0 <= d < size:
                problems.append(Violation('structure', f"vertex {index} lists unknown dart {d!r}"))
            elif d in seen:
                problems.append(Violation('structure', f"dart {d} appears at vertices {seen[d]} and {index}", (d,)))
            else:
                seen[d] = index
    missing = [d for d in range(size) if d not in seen]
    if missing:
        problems.append(Violation('structure', f"rotation does not cover darts {missing}", tuple(missing)))
    covered: Set[int] = set()
    for edge in edges:
        darts = tuple(edge.darts) if isinstance(edge, Edge) else tuple(edge.get('darts', ()))
        head = edge.head if isinstance(edge, Edge) else edge.get('head')
        if len(darts) != 2 or any(not isinstance(d, int) or not 0 <= d < size for d in darts):
            problems.append(Violation('structure', f"edge {darts} is malformed"))
            continue
        a, b = darts
        if opposite[a] != b:
            problems.append(Violation('structure', f"edge {darts} is not an opposite pair", darts))
        if a in covered or b in covered:
            problems.append(Violation('structure', f"edge {darts} repeats a dart", darts))
        covered.update(darts)
        if head is not None and head not in darts:
            problems.append(Violation('structure', f"head {head} is not a dart of edge {darts}", darts))
    if len(covered) != size:
        problems.append(Violation('structure', "edge table does not cover every dart"))
    return problems


def _face_cycles(opposite: Sequence[int], sigma: Sequence[int]) -> List[Tuple[int, ...]]:
    seen = [False] * len(opposite)
    cycles = []
    for start in range(len(opposite)):
        if seen[start]:
            continue
        cycle = []
        d = start
        while not seen[d]:
            seen[d] = True
            cycle.append(d)
            d = sigma[opposite[d]]
        cycles.append(tuple(cycle))
    return cycles


@dataclass(frozen=True)
class Chart:
    """Immutable chart; build instances with `Chart.build` to get canonical ordering"""
    n: int
    opposite: Tuple[int, ...]
    vertices: Tuple[Tuple[int, ...], ...]
    edges: Tuple[Edge, ...]
    regions: Tuple[Tuple[int, ...], ...]
    infinity_face: int

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def empty(cls, n: int) -> 'Chart':
        return cls(n=n, opposite=(), vertices=(), edges=(), regions=((),), infinity_face=0)

    @classmethod
    def build(cls, n: int, opposite: Sequence[int], vertices: Sequence[Sequence[int]],
              edges: Sequence[Any], regions: Optional[Sequence[Sequence[int]]] = None,
              infinity_face: int = 0) -> 'Chart':
        """
        Normalise raw arrays into a chart.

        Args:
            edges: `Edge` values or dicts with darts/label/head
            regions: per region, any dart of each boundary cycle; may be omitted
                for connected charts (every cycle is its own region)
            infinity_face: index into `regions`
        """
        problems = structural_violations(n, opposite, vertices, edges)
        if problems:
            raise ChartFormatError('; '.join(p.message for p in problems[:5]))
        opposite = tuple(opposite)
        size = len(opposite)
        if size == 0:
            return cls.empty(n)

        rotations = []
        for rotation in vertices:
            rotation = list(rotation)
            k = rotation.index(min(rotation))
            rotations.append(tuple(rotation[k:] + rotation[:k]))
        rotations.sort()

        sigma = [0] * size
        for rotation in rotations:
            for i, d in enumerate(rotation):
                sigma[d] = rotation[(i + 1) % len(rotation)]
        cycles = _face_cycles(opposite, sigma)
        cycle_min = {}
        for cycle in cycles:
            low = min(cycle)
            for d in cycle:
                cycle_min[d] = low

        if regions is None:
            components = _dart_components(opposite, rotations)
            if len(components) > 1:
                raise ChartFormatError("a disconnected chart needs an explicit region table")
            regions = [[c[0]] for c in cycles]
            infinity_face = min(infinity_face, len(regions) - 1)

        normalized = []
        for region in regions:
            normalized.append(tuple(sorted({cycle_min[d] for d in region if 0 <= d < size})))
        if not 0 <= infinity_face < len(normalized):
            raise ChartFormatError(f"infinity face {infinity_face} is not a region index")
        infinity_key = normalized[infinity_face]
        order = sorted(range(len(normalized)), key=lambda i: normalized[i])
        region_table = tuple(normalized[i] for i in order)
        infinity = order.index(infinity_face)
        if region_table[infinity] != infinity_key:
            infinity = region_table.index(infinity_key)

        table = []
        for edge in edges:
            if isinstance(edge, Edge):
                darts, label, head = edge.darts, edge.label, edge.head
            else:
                darts, label, head = edge['darts'], edge['label'], edge.get('head')
            table.append(Edge(tuple(sorted(darts)), int(label), head))
        table.sort(key=lambda e: e.darts)

        return cls(n=n, opposite=opposite, vertices=tuple(rotations), edges=tuple(table),
                   regions=region_table, infinity_face=infinity)

    # ------------------------------------------------------------------
    # Dart-level structure
    # ------------------------------------------------------------------

    @property
    def dart_count(self) -> int:
        return len(self.opposite)

    @cached_property
    def vertex_of(self) -> Tuple[int, ...]:
        table = [0] * self.dart_count
        for v, rotation in enumerate(self.vertices):
            for d in rotation:
                table[d] = v
        return tuple(table)

    @cached_property
    def position(self) -> Tuple[int, ...]:
        table = [0] * self.dart_count
        for rotation in self.vertices:
            for i, d in enumerate(rotation):
                table[d] = i
        return tuple(table)

    @cached_property
    def edge_of(self) -> Tuple[int, ...]:
        table = [0] * self.dart_count
        for index, edge in enumerate(self.edges):
            for d in edge.darts:
                table[d] = index
        return tuple(table)

    @cached_property
    def _sigma(self) -> Tuple[int, ...]:
        table = [0] * self.dart_count
        for rotation in self.vertices:
            for i, d in enumerate(rotation):
                table[d] = rotation[(i + 1) % len(rotation)]
        return tuple(table)

    @cached_property
    def _sigma_inv(self) -> Tuple[int, ...]:
        table = [0] * self.dart_count
        for d, nxt in enumerate(self._sigma):
            table[nxt] = d
        return tuple(table)

    def sigma(self, d: int, k: int = 1) -> int:
        """Next dart counter-clockwise around the vertex (k steps, negative allowed)"""
        rotation = self.vertices[self.vertex_of[d]]
        return rotation[(self.position[d] + k) % len(rotation)]

    def sigma_inv(self, d: int) -> int:
        return self._sigma_inv[d]

    def alpha(self, d: int) -> int:
        return self.opposite[d]

    def phi(self, d: int) -> int:
        """Face permutation: the next dart along the face on the right of d"""
        return self._sigma[self.opposite[d]]

    def edge(self, d: int) -> Edge:
        return self.edges[self.edge_of[d]]

    def label(self, d: int) -> int:
        return self.edges[self.edge_of[d]].label

    def is_inward(self, d: int) -> Optional[bool]:
        """True when the edge points into d's vertex; None for unoriented edges"""
        head = self.edges[self.edge_of[d]].head
        if head is None:
            return None
        return head == d

    def degree(self, v: int) -> int:
        return len(self.vertices[v])

    def kind(self, v: int) -> VertexKind:
        return self.kinds[v]

    @cached_property
    def kinds(self) -> Tuple[VertexKind, ...]:
        result = []
        for rotation in self.vertices:
            deg = len(rotation)
            if deg == 1:
                result.append(VertexKind.BLACK)
            elif deg == 4:
                result.append(VertexKind.CROSSING)
            elif deg == 6:
                result.append(VertexKind.WHITE)
            elif deg == 2:
                a, b = rotation
                result.append(VertexKind.MARKER if self.opposite[a] == b else VertexKind.JOINT)
            elif deg == 3:
                result.append(VertexKind.BRANCH)
            else:
                result.append(VertexKind.INVALID)
        return tuple(result)

    def vertices_of_kind(self, kind: VertexKind) -> List[int]:
        return [v for v, k in enumerate(self.kinds) if k is kind]

    @cached_property
    def white_pair(self) -> Dict[int, int]:
        """Lower label m of the pair (m, m+1) at each white vertex"""
        return {v: min(self.label(d) for d in self.vertices[v])
                for v in self.vertices_of_kind(VertexKind.WHITE)}

    # ------------------------------------------------------------------
    # Faces, regions, components
    # ------------------------------------------------------------------

    @cached_property
    def face_cycles(self) -> Tuple[Tuple[int, ...], ...]:
        cycles = _face_cycles(self.opposite, self._sigma)
        return tuple(sorted(cycles, key=min))

    @cached_property
    def cycle_of(self) -> Tuple[int, ...]:
        table = [0] * self.dart_count
        for index, cycle in enumerate(self.face_cycles):
            for d in cycle:
                table[d] = index
        return tuple(table)

    @cached_property
    def region_of_cycle(self) -> Tuple[int, ...]:
        mins = {min(cycle): i for i, cycle in enumerate(self.face_cycles)}
        table = [-1] * len(self.face_cycles)
        for r, region in enumerate(self.regions):
            for rep in region:
                if rep in mins:
                    table[mins[rep]] = r
        return tuple(table)

    def region_of(self, d: int) -> int:
        return self.region_of_cycle[self.cycle_of[d]]

    def cycles_in_region(self, r: int) -> List[int]:
        return [i for i, owner in enumerate(self.region_of_cycle) if owner == r]

    @cached_property
    def component_of_vertex(self) -> Tuple[int, ...]:
        graph = nx.Graph()
        graph.add_nodes_from(range(len(self.vertices)))
        for edge in self.edges:
            a, b = edge.darts
            graph.add_edge(self.vertex_of[a], self.vertex_of[b])
        table = [0] * len(self.vertices)
        parts = sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])
        for index, part in enumerate(parts):
            for v in part:
                table[v] = index
        return tuple(table)

    @property
    def component_count(self) -> int:
        return len(set(self.component_of_vertex))

    def component_of_dart(self, d: int) -> int:
        return self.component_of_vertex[self.vertex_of[d]]

    # ------------------------------------------------------------------
    # Strands
    # ------------------------------------------------------------------

    def follow(self, d: int) -> Tuple[List[int], bool]:
        """
        Walk the strand leaving through dart d, straight through crossings
        (diagonal) and through degree-2 vertices.

        Returns:
            the forward dart of every traversed edge, and whether the walk
            closed up on itself
        """
        path = [d]
        x = d
        for _ in range(self.dart_count + 1):
            y = self.opposite[x]
            deg = len(self.vertices[self.vertex_of[y]])
            if deg == 4:
                x = self.sigma(y, 2)
            elif deg == 2:
                x = self.sigma(y, 1)
            else:
                return path, False
            if x == d:
                return path, True
            path.append(x)
        raise ChartFormatError(f"strand from dart {d} does not terminate")

    def strand_end(self, d: int) -> int:
        """Dart at the far end of the strand leaving through d"""
        path, closed = self.follow(d)
        return d if closed else self.opposite[path[-1]]

    # ------------------------------------------------------------------
    # Region flooding
    # ------------------------------------------------------------------

    def flood_regions(self, seeds: Iterable[int], blocked_edges: Set[int]) -> Set[int]:
        """Regions reachable from the seed regions without crossing a blocked edge"""
        by_region: Dict[int, List[int]] = {}
        for d in range(self.dart_count):
            by_region.setdefault(self.region_of(d), []).append(d)
        reached = set(seeds)
        stack = list(reached)
        while stack:
            r = stack.pop()
            for d in by_region.get(r, ()):
                if self.edge_of[d] in blocked_edges:
                    continue
                other = self.region_of(self.opposite[d])
                if other not in reached:
                    reached.add(other)
                    stack.append(other)
        return reached

    def curve_sides(self, forward: Sequence[int]) -> Tuple[Set[int], Set[int]]:
        """
        Split the regions by a closed curve given as forward darts.

        Returns:
            (regions on the left of travel, regions on the right)
        """
        blocked = {self.edge_of[d] for d in forward}
        right = self.flood_regions({self.region_of(d) for d in forward}, blocked)
        left = self.flood_regions({self.region_of(self.opposite[d]) for d in forward}, blocked)
        return left, right

    def vertices_in_regions(self, regions: Set[int]) -> Set[int]:
        """Vertices with at least one corner in the given regions"""
        return {self.vertex_of[d] for d in range(self.dart_count) if self.region_of(d) in regions}

    # ------------------------------------------------------------------
    # Serialisation
    # ------------------------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        return {
            'version': FORMAT_VERSION,
            'n': self.n,
            'opposite': list(self.opposite),
            'vertices': [list(r) for r in self.vertices],
            'edges': [e.to_dict() for e in self.edges],
            'regions': [list(r) for r in self.regions],
            'infinity_face': self.infinity_face,
        }


def _dart_components(opposite: Sequence[int], rotations: Sequence[Sequence[int]]) -> List[List[int]]:
    graph = nx.Graph()
    graph.add_nodes_from(range(len(opposite)))
    for d, o in enumerate(opposite):
        graph.add_edge(d, o)
    for rotation in rotations:
        for a, b in zip(rotation, rotation[1:]):
            graph.add_edge(a, b)
    return sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])


# ----------------------------------------------------------------------
# Symmetries and renumbering
# ----------------------------------------------------------------------

def reflect(chart: Chart) -> Chart:
    """Mirror image r(G): every rotation reversed"""
    if chart.dart_count == 0:
        return chart
    vertices = [tuple(reversed(r)) for r in chart.vertices]
    # reflected boundary cycles are the opposite-images of the old ones
    regions = [[chart.opposite[d] for d in region] for region in chart.regions]
    return Chart.build(chart.n, chart.opposite, vertices, chart.edges, regions, chart.infinity_face)


def reverse(chart: Chart) -> Chart:
    """Orientation reversal G*: every head moves to the other end"""
    edges = []
    for e in chart.edges:
        head = None if e.head is None else (e.darts[1] if e.head == e.darts[0] else e.darts[0])
        edges.append(Edge(e.darts, e.label, head))
    return replace(chart, edges=tuple(edges))


def renumber(chart: Chart, perm: Sequence[int]) -> Chart:
    """Relabel dart d as perm[d]"""
    size = chart.dart_count
    if sorted(perm) != list(range(size)):
        raise ChartFormatError("renumbering must be a permutation of the darts")
    opposite = [0] * size
    for d, o in enumerate(chart.opposite):
        opposite[perm[d]] = perm[o]
    vertices = [[perm[d] for d in r] for r in chart.vertices]
    edges = [Edge(tuple(sorted(perm[d] for d in e.darts)), e.label,
                  None if e.head is None else perm[e.head]) for e in chart.edges]
    regions = [[perm[d] for d in region] for region in chart.regions]
    return Chart.build(chart.n, opposite, vertices, edges, regions, chart.infinity_face)


def set_infinity(chart: Chart, region: int) -> Chart:
    """Move the point at infinity into another region"""
    if not 0 <= region < len(chart.regions):
        raise ChartFormatError(f"region {region} does not exist")
    return replace(chart, infinity_face=region)


# ----------------------------------------------------------------------
# Validation
# ----------------------------------------------------------------------

def inward_run(flags: Sequence[bool]) -> Optional[int]:
    """Start of the run of three consecutive inward darts, if the pattern is 3+3"""
    size = len(flags)
    if sum(flags) != 3:
        return None
    for start in range(size):
        if all(flags[(start + i) % size] for i in range(3)):
            return start
    return None


def _check_vertices(chart: Chart, report: ValidationReport):
    for v, rotation in enumerate(chart.vertices):
        kind = chart.kinds[v]
        if kind in (VertexKind.BLACK, VertexKind.MARKER):
            continue
        if kind is VertexKind.WHITE:
            labels = [chart.label(d) for d in rotation]
            even, odd = set(labels[0::2]), set(labels[1::2])
            if len(even) != 1 or len(odd) != 1 or abs(labels[0] - labels[1]) != 1:
                report.add('white-labels', f"white vertex {v} does not alternate between m and m+1", rotation)
            flags = [chart.is_inward(d) for d in rotation]
            if None in flags:
                continue
            if inward_run(flags) is None:
                report.add('white-orientation',
                           f"white vertex {v} does not have three consecutive inward darts", rotation)
        elif kind is VertexKind.CROSSING:
            c0, c1, c2, c3 = rotation
            l0, l1 = chart.label(c0), chart.label(c1)
            if l0 != chart.label(c2) or l1 != chart.label(c3):
                report.add('crossing-labels', f"diagonals at crossing {v} carry different labels", rotation)
            elif abs(l0 - l1) <= 1:
                report.add('crossing-labels', f"crossing {v} has labels {l0} and {l1} with |i-j| <= 1", rotation)
            for a, b in ((c0, c2), (c1, c3)):
                fa, fb = chart.is_inward(a), chart.is_inward(b)
                if fa is not None and fb is not None and fa == fb:
                    report.add('crossing-orientation',
                               f"diagonal darts {a}, {b} at crossing {v} are not coherent", (a, b))
        else:
            report.add('degree', f"vertex {v} has degree {len(rotation)}", rotation)


def _check_topology(chart: Chart, report: ValidationReport):
    V, E, R = len(chart.vertices), len(chart.edges), len(chart.regions)
    C = chart.component_count if V else 0
    if V - E + R != 1 + C:
        report.add('euler', f"V - E + F = {V - E + R}, expected {1 + C}")

    cycles = chart.face_cycles
    for index, owner in enumerate(chart.region_of_cycle):
        if owner < 0:
            report.add('regions', f"face cycle {cycles[index]} belongs to no region", cycles[index][:1])
    listed = [rep for region in chart.regions for rep in region]
    if len(listed) != len(set(listed)) or len(listed) != len(cycles):
        report.add('regions', "region table does not list every boundary cycle exactly once")

    per_component = Counter()
    for cycle in cycles:
        per_component[chart.component_of_dart(cycle[0])] += 1
    vertex_count = Counter(chart.component_of_vertex)
    edge_count = Counter(chart.component_of_dart(e.darts[0]) for e in chart.edges)
    for comp, nv in vertex_count.items():
        chi = nv - edge_count[comp] + per_component[comp]
        if chi != 2:
            report.add('genus', f"component {comp} has Euler characteristic {chi}, not a sphere embedding")

    incidence = nx.MultiGraph()
    incidence.add_nodes_from(('r', r) for r in range(R))
    incidence.add_nodes_from(('c', c) for c in vertex_count)
    for index, owner in enumerate(chart.region_of_cycle):
        if owner >= 0:
            incidence.add_edge(('r', owner), ('c', chart.component_of_dart(cycles[index][0])))
    simple = nx.Graph(incidence)
    if simple.number_of_edges() != incidence.number_of_edges():
        report.add('regions', "a region touches one component along two boundary cycles")
    elif not nx.is_tree(simple):
        report.add('regions', "regions and components do not nest as a tree")

    if not 0 <= chart.infinity_face < R:
        report.add('infinity', f"infinity face {chart.infinity_face} is not a region")


def validate(chart: Chart, strict: bool = False) -> ValidationReport:
    """
    Check the chart axioms (degrees, labels, white / crossing conditions,
    sphere embedding). With strict=True also check the minimal-candidate
    assumptions on terminal edges, free edges, simple hoops and the white
    content of every complementary domain of rings and hoops.
    """
    report = ValidationReport(strict=strict)
    for index, edge in enumerate(chart.edges):
        if not 1 <= edge.label <= chart.n - 1:
            report.add('label-range', f"edge {edge.darts} has label {edge.label} outside 1..{chart.n - 1}",
                       edge.darts)
        if edge.head is None:
            report.add('orientation-missing', f"edge {edge.darts} carries no orientation", edge.darts)
    _check_vertices(chart, report)
    _check_topology(chart, report)
    if strict and report.is_valid:
        _check_assumptions(chart, report)
    return report


def middle_darts(chart: Chart, v: int) -> Tuple[int, int]:
    """(middle inward dart, middle outward dart) at a white vertex"""
    rotation = chart.vertices[v]
    flags = [bool(chart.is_inward(d)) for d in rotation]
    start = inward_run(flags)
    if start is None:
        raise ChartFormatError(f"vertex {v} has no inward triple")
    return rotation[(start + 1) % 6], rotation[(start + 4) % 6]


def _white_vertices_on_side(chart: Chart, regions: Set[int]) -> int:
    whites = chart.vertices_of_kind(VertexKind.WHITE)
    inside = chart.vertices_in_regions(regions)
    return sum(1 for v in whites if v in inside)


def _check_assumptions(chart: Chart, report: ValidationReport):
    blacks = chart.vertices_of_kind(VertexKind.BLACK)
    for v in blacks:
        d = chart.vertices[v][0]
        end = chart.strand_end(d)
        end_kind = chart.kinds[chart.vertex_of[end]]
        if end_kind is VertexKind.BLACK:
            if d < end:
                report.add('free-edge', f"free edge between black vertices {v} and {chart.vertex_of[end]}", (d, end))
        elif end_kind is VertexKind.WHITE:
            if end not in middle_darts(chart, chart.vertex_of[end]):
                report.add('terminal-middle', f"terminal edge at dart {end} is not middle at its white vertex",
                           (d, end))

    seen: Set[int] = set()
    for d in range(chart.dart_count):
        if d in seen or chart.kinds[chart.vertex_of[d]] in (VertexKind.WHITE, VertexKind.BLACK):
            continue
        path, closed = chart.follow(d)
        if not closed:
            continue
        for x in path:
            seen.add(x)
            seen.add(chart.opposite[x])
        through = {chart.kinds[chart.vertex_of[x]] for x in path}
        if VertexKind.WHITE in through:
            continue
        name = 'ring' if VertexKind.CROSSING in through else 'hoop'
        left, right = chart.curve_sides(path)
        counts = (_white_vertices_on_side(chart, left), _white_vertices_on_side(chart, right))
        if name == 'hoop' and min(counts) == 0:
            report.add('simple-hoop', f"hoop through dart {d} has a side without white vertices", tuple(path))
        if min(counts) == 0:
            report.add('empty-side', f"a complementary domain of the {name} through dart {d} "
                       f"contains no white vertex", tuple(path))


# ----------------------------------------------------------------------
# Measures and type
# ----------------------------------------------------------------------

def free_edges(chart: Chart) -> List[Tuple[int, int]]:
    """Free edges as (black dart, black dart) pairs"""
    result = []
    for v in chart.vertices_of_kind(VertexKind.BLACK):
        d = chart.vertices[v][0]
        end = chart.strand_end(d)
        if chart.kinds[chart.vertex_of[end]] is VertexKind.BLACK and d < end:
            result.append((d, end))
    return result


def measures(chart: Chart) -> Measures:
    """w, f, c and complexity (w, -f)"""
    kinds = Counter(chart.kinds)
    return Measures.of(w=kinds[VertexKind.WHITE], f=len(free_edges(chart)),
                       c=kinds[VertexKind.CROSSING], b=kinds[VertexKind.BLACK])


def local_measures(chart: Chart, vertices: Iterable[int]) -> Tuple[int, int]:
    """(w(X), c(X)) for a set of vertices"""
    chosen = set(vertices)
    w = sum(1 for v in chosen if chart.kinds[v] is VertexKind.WHITE)
    c = sum(1 for v in chosen if chart.kinds[v] is VertexKind.CROSSING)
    return w, c


def chart_type(chart: Chart) -> Optional[ChartType]:
    """Type (m; n_1..n_k) or None ("untyped") when there is no white vertex"""
    for v, m in chart.white_pair.items():
        labels = {chart.label(d) for d in chart.vertices[v]}
        if labels != {m, m + 1}:
            message = f"white vertex {v} carries labels {sorted(labels)}, not a pair (m, m+1)"
            raise ChartValidationError(message, [Violation('white-labels', message, tuple(chart.vertices[v]))])
    pairs = Counter(chart.white_pair.values())
    if not pairs:
        return None
    low, high = min(pairs), max(pairs)
    counts = tuple(pairs.get(m, 0) for m in range(low, high + 1))
    return ChartType(m=low, counts=counts)


# ----------------------------------------------------------------------
# File I/O
# ----------------------------------------------------------------------

def chart_from_dict(doc: Dict[str, Any]) -> Chart:
    """Build a chart from the canonical JSON document"""
    if doc.get('format') == 'sketch':
        from sketch import load_sketch_doc
        return load_sketch_doc(doc).chart
    try:
        version = doc.get('version', FORMAT_VERSION)
        if version != FORMAT_VERSION:
            raise ChartFormatError(f"unsupported chart format version {version}")
        return Chart.build(doc['n'], doc['opposite'], doc['vertices'], doc['edges'],
                           doc.get('regions'), doc.get('infinity_face', 0))
    except (KeyError, TypeError, ValueError) as e:
        raise ChartFormatError(f"malformed chart document: {e}") from e


def check_document(doc: Dict[str, Any]) -> ValidationReport:
    """Structural check of a raw document, reported instead of raised"""
    report = ValidationReport()
    for problem in structural_violations(doc.get('n'), doc.get('opposite', []),
                                         doc.get('vertices', []), doc.get('edges', [])):
        report.violations.append(problem)
    return report


def dumps_chart(chart: Chart) -> str:
    """Canonical text: one key per line, compact arrays"""
    doc = chart.to_dict()
    lines = [f'  {json.dumps(key)}: {json.dumps(value, separators=(",", ":"))}' for key, value in doc.items()]
    return '{\n' + ',\n'.join(lines) + '\n}\n'


def loads_chart(text: str) -> Chart:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ChartFormatError(f"invalid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ChartFormatError("chart document must be a JSON object")
    return chart_from_dict(doc)


def load_chart(path: str) -> Chart:
    with open(path, 'r', encoding='utf-8') as fh:
        chart = loads_chart(fh.read())
    logger.debug(f"Loaded chart {path}: {len(chart.vertices)} vertices, {len(chart.edges)} edges")
    return chart


def save_chart(chart: Chart, path: str):
    with open(path, 'w', encoding='utf-8') as fh:
        fh.write(dumps_chart(chart))
    logger.debug(f"Saved chart to {path}")
