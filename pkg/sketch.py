"""
Sketch documents
Эскизы диаграмм

Hand-writable chart input with named vertices and edges. Every fixture,
catalog entry, scenario base and move script refers to charts through the
name table a sketch produces.

Document shape:

    {
      "format": "sketch",
      "n": 4,
      "edges": {"e1": {"label": 1, "from": "w1", "to": "w2"}, ...},
      "vertices": {"w1": ["e1", "in:2", "e2", ...], ...},
      "hoops": {"h": {"label": 3, "direction": "ccw", "in": {"edge": "e1", "side": "left"}}},
      "placements": {"u1": {"edge": "e1", "side": "right", "via": {"edge": "f1", "side": "left"}}},
      "infinity": {"edge": "e1", "side": "right"},
      "regions": {"F": {"seed": {"edge": "e1", "side": "left"}, "boundary": ["e2", "e3"]}}
    }

Rotations list tokens counter-clockwise. A token is an edge name, `name:tail`
or `name:head` for loops, or a stub `in:k` / `out:k` adding a terminal edge of
label k to a new black vertex. Edge endpoints missing from `vertices` become
black vertices. Sides are taken relative to the edge direction from -> to.
A named region is every face reached from its seed side without crossing
its boundary edges.
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Tuple

from chart import Chart
from editor import ChartEditor
from errors import ChartFormatError

logger = logging.getLogger(__name__)


@dataclass
class SketchNames:
    """Map from sketch names to chart ids"""
    vertices: Dict[str, int] = field(default_factory=dict)
    # name -> (dart at the tail end, dart at the head end)
    edges: Dict[str, Tuple[int, int]] = field(default_factory=dict)
    # name -> (inner dart, outer dart)
    hoops: Dict[str, Tuple[int, int]] = field(default_factory=dict)
    # name -> chart regions
    regions: Dict[str, FrozenSet[int]] = field(default_factory=dict)

    def dart(self, edge: str, end: str = 'tail') -> int:
        """Dart of a named edge or hoop: end is tail/head, or inner/outer for hoops"""
        if edge in self.edges:
            tail, head = self.edges[edge]
            if end not in ('tail', 'head'):
                raise ChartFormatError(f"edge end must be tail or head, got {end!r}")
            return tail if end == 'tail' else head
        if edge in self.hoops:
            inner, outer = self.hoops[edge]
            return inner if end in ('inner', 'tail') else outer
        raise ChartFormatError(f"unknown edge name {edge!r}")

    def side_dart(self, edge: str, side: str) -> int:
        """Dart whose face lies on the given side of a named edge"""
        if edge in self.hoops:
            return self.dart(edge, 'inner' if side in ('inner', 'right') else 'outer')
        if side == 'right':
            return self.dart(edge, 'tail')
        if side == 'left':
            return self.dart(edge, 'head')
        raise ChartFormatError(f"side must be left or right, got {side!r}")

    def vertex(self, name: str) -> int:
        try:
            return self.vertices[name]
        except KeyError:
            raise ChartFormatError(f"unknown vertex name {name!r}")

    def region(self, name: str) -> FrozenSet[int]:
        try:
            return self.regions[name]
        except KeyError:
            raise ChartFormatError(f"unknown region name {name!r}")

    def remap(self, dart_map: Dict[int, int], chart: Chart) -> 'SketchNames':
        """Names after the chart was renumbered by dart_map"""
        result = SketchNames()
        result.edges = {k: (dart_map[a], dart_map[b]) for k, (a, b) in self.edges.items()}
        result.hoops = {k: (dart_map[a], dart_map[b]) for k, (a, b) in self.hoops.items()}
        for name, dart in self._vertex_darts.items():
            result.vertices[name] = chart.vertex_of[dart_map[dart]]
        result._vertex_darts = {k: dart_map[d] for k, d in self._vertex_darts.items()}
        return result

    _vertex_darts: Dict[str, int] = field(default_factory=dict, repr=False)


@dataclass
class Sketch:
    chart: Chart
    names: SketchNames
    name: str = ''


def _side_of(names: SketchNames, spec: Dict[str, Any], what: str) -> int:
    if not isinstance(spec, dict) or 'edge' not in spec:
        raise ChartFormatError(f"{what} needs an edge name and a side")
    return names.side_dart(spec['edge'], spec.get('side', 'right'))


def load_sketch_doc(doc: Dict[str, Any], name: str = '') -> Sketch:
    """Build a chart and its name table from a sketch document"""
    if doc.get('format') != 'sketch':
        raise ChartFormatError("not a sketch document")
    try:
        n = int(doc['n'])
    except (KeyError, TypeError, ValueError):
        raise ChartFormatError("sketch needs an integer braid degree n")

    editor = ChartEditor(n)
    editor.infinity_tag = None
    names = SketchNames()
    ends: Dict[str, Tuple[int, int]] = {}
    endpoints: Dict[str, Tuple[str, str]] = {}

    for edge_name, spec in (doc.get('edges') or {}).items():
        try:
            label = int(spec['label'])
            endpoints[edge_name] = (spec['from'], spec['to'])
        except (KeyError, TypeError, ValueError):
            raise ChartFormatError(f"edge {edge_name!r} needs label, from and to")
        oriented = spec.get('oriented', True)
        tail, head = editor.new_edge(label, 1 if oriented else None)
        ends[edge_name] = (tail, head)
    names.edges = dict(ends)

    used: Dict[int, str] = {}
    rotations: Dict[str, List[int]] = {}
    for vertex_name, tokens in (doc.get('vertices') or {}).items():
        rotation = []
        for index, token in enumerate(tokens):
            if token.startswith('in:') or token.startswith('out:'):
                direction, _, label = token.partition(':')
                stub_name = f"{vertex_name}#{index}"
                here, there = editor.new_dart(), editor.new_dart()
                editor.link(here, there, int(label), here if direction == 'in' else there)
                rotations[stub_name] = [there]
                names.edges[stub_name] = (there, here) if direction == 'in' else (here, there)
                dart = here
            else:
                edge_name, _, end = token.partition(':')
                if edge_name not in ends:
                    raise ChartFormatError(f"vertex {vertex_name!r} lists unknown edge {edge_name!r}")
                tail, head = ends[edge_name]
                source, target = endpoints[edge_name]
                if end:
                    dart = tail if end == 'tail' else head
                elif source == target:
                    raise ChartFormatError(f"loop {edge_name!r} at {vertex_name!r} needs :tail or :head")
                elif vertex_name == source:
                    dart = tail
                elif vertex_name == target:
                    dart = head
                else:
                    raise ChartFormatError(f"edge {edge_name!r} does not end at {vertex_name!r}")
            if dart in used:
                raise ChartFormatError(f"edge end {token!r} is used twice")
            used[dart] = vertex_name
            rotation.append(dart)
        rotations[vertex_name] = rotation

    for edge_name, (source, target) in endpoints.items():
        tail, head = ends[edge_name]
        for vertex_name, dart in ((source, tail), (target, head)):
            if dart in used:
                if used[dart] != vertex_name:
                    raise ChartFormatError(f"edge {edge_name!r} is listed at the wrong vertex")
                continue
            if vertex_name in rotations and vertex_name in (doc.get('vertices') or {}):
                raise ChartFormatError(f"vertex {vertex_name!r} does not list edge {edge_name!r}")
            rotations.setdefault(vertex_name, []).append(dart)
            used[dart] = vertex_name

    for vertex_name, rotation in rotations.items():
        editor.add_vertex(rotation)
        names._vertex_darts[vertex_name] = rotation[0]

    # every face cycle starts as its own region; placements glue them
    sigma = {}
    for rotation in rotations.values():
        for i, d in enumerate(rotation):
            sigma[d] = rotation[(i + 1) % len(rotation)]
    cycle_of: Dict[int, int] = {}
    cycles: List[List[int]] = []
    for start in sorted(editor.alpha):
        if start in cycle_of:
            continue
        cycle, d = [], start
        while d not in cycle_of:
            cycle_of[d] = len(cycles)
            cycle.append(d)
            d = sigma[editor.alpha[d]]
        cycles.append(cycle)
    parent = list(range(len(cycles)))

    def root(c: int) -> int:
        while parent[c] != c:
            c = parent[c]
        return c

    for hoop_name, spec in (doc.get('hoops') or {}).items():
        label = int(spec['label'])
        inner, outer = editor.new_dart(), editor.new_dart()
        ccw = spec.get('direction', 'ccw') == 'ccw'
        editor.link(inner, outer, label, inner if ccw else outer)
        editor.add_vertex([inner, outer])
        names.hoops[hoop_name] = (inner, outer)
        names._vertex_darts[hoop_name] = inner
        cycle_of[inner], cycle_of[outer] = len(cycles), len(cycles) + 1
        cycles.extend([[inner], [outer]])
        parent.extend([len(parent), len(parent) + 1])
        if 'in' in spec:
            host = cycle_of[_side_of(names, spec['in'], f"hoop {hoop_name!r}")]
            parent[cycle_of[outer]] = root(host)

    for vertex_name, spec in (doc.get('placements') or {}).items():
        host = cycle_of[_side_of(names, spec, f"placement of {vertex_name!r}")]
        if vertex_name not in rotations:
            raise ChartFormatError(f"placement names unknown vertex {vertex_name!r}")
        if 'via' in spec:
            via = cycle_of[_side_of(names, spec['via'], f"via of {vertex_name!r}")]
        else:
            component = _component_cycles(editor, cycle_of, rotations[vertex_name][0])
            via = max(component, key=lambda c: (len(cycles[c]), -c))
        if root(via) == root(host):
            raise ChartFormatError(f"placement of {vertex_name!r} points into its own component")
        parent[root(via)] = root(host)

    for c, cycle in enumerate(cycles):
        for d in cycle:
            if d not in editor.tags:
                editor.tag(d, root(c))

    if 'infinity' in doc:
        anchor = _side_of(names, doc['infinity'], "infinity")
        editor.infinity_tag = editor.tags[anchor]
    elif cycles:
        largest = max(range(len(cycles)), key=lambda c: (len(cycles[c]), -c))
        editor.infinity_tag = editor.tags[cycles[largest][0]]
    if cycles:
        editor.set_infinity_fallback(cycles[0][0])

    chart, dart_map = editor.freeze(normalize=False)
    result = names.remap(dart_map, chart)
    for region_name, spec in (doc.get('regions') or {}).items():
        result.regions[region_name] = _named_region(chart, result, region_name, spec)
    logger.debug(f"Loaded sketch {name or '<inline>'}: {len(chart.vertices)} vertices")
    return Sketch(chart=chart, names=result, name=name)


def _named_region(chart: Chart, names: SketchNames, region_name: str, spec: Dict[str, Any]) -> FrozenSet[int]:
    """Regions reached from a seed side without crossing the listed edges"""
    if not isinstance(spec, dict) or 'seed' not in spec:
        raise ChartFormatError(f"region {region_name!r} needs a seed side")
    start = chart.region_of(_side_of(names, spec['seed'], f"region {region_name!r}"))
    blocked = {chart.edge_of[names.dart(e)] for e in spec.get('boundary', [])}
    return frozenset(chart.flood_regions({start}, blocked))


def _component_cycles(editor: ChartEditor, cycle_of: Dict[int, int], start: int) -> List[int]:
    seen = {start}
    stack = [start]
    while stack:
        d = stack.pop()
        neighbours = [editor.alpha[d]] + editor.rotations[editor.vertex[d]]
        for x in neighbours:
            if x not in seen:
                seen.add(x)
                stack.append(x)
    return sorted({cycle_of[d] for d in seen})


def load_sketch(path: str) -> Sketch:
    with open(path, 'r', encoding='utf-8') as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ChartFormatError(f"invalid JSON in {path}: {e}") from e
    return load_sketch_doc(doc, name=path)
