"""
Label subgraphs, skeletons and the pattern catalog
Подграфы по метке, скелеты и каталог образцов

Gamma_m is the union of the label-m edges. Its chains are walked straight
through crossings and classified as free, terminal, internal, loop, hoop or
ring. A skeleton is Gamma_m as a partial chart of its own: whites become
trivalent vertices, blacks univalent ones, chains become edges. Catalog
shapes are matched against skeleton components up to the RO-family.
"""

import json
import logging
import os
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from canonical import canonical_code, isomorphism
from chart import Chart, Edge, VertexKind, middle_darts
from config import CatalogConfig
from editor import ChartEditor
from errors import ChartFormatError, ChartkitError

logger = logging.getLogger(__name__)

CHAIN_KINDS = ('free', 'terminal', 'internal', 'loop', 'hoop', 'ring')


@dataclass(frozen=True)
class Chain:
    """Maximal label-m path through crossings"""
    kind: str
    darts: Tuple[int, ...]          # forward darts, one per traversed chart edge
    start: Optional[int] = None     # dart at the start vertex (None for closed chains)
    end: Optional[int] = None       # dart at the end vertex
    crossings: int = 0

    @property
    def key(self) -> Tuple[int, ...]:
        if self.start is None:
            return (min(self.darts),)
        return tuple(sorted((self.start, self.end)))

    def ends(self) -> Tuple[int, ...]:
        return () if self.start is None else (self.start, self.end)


@dataclass
class LabelSubgraph:
    """Gamma_m of a chart"""
    chart: Chart
    m: int
    chains: List[Chain] = field(default_factory=list)
    whites: List[int] = field(default_factory=list)
    blacks: List[int] = field(default_factory=list)

    def chain_at(self, dart: int) -> Chain:
        """Chain owning an end dart or any traversed dart"""
        for chain in self.chains:
            if dart in chain.ends() or dart in chain.darts:
                return chain
            if any(self.chart.alpha(d) == dart for d in chain.darts):
                return chain
        raise ChartkitError(f"dart {dart} is not on a label-{self.m} chain")

    def by_kind(self, kind: str) -> List[Chain]:
        return [c for c in self.chains if c.kind == kind]

    def end_count(self) -> int:
        return sum(len(c.ends()) for c in self.chains)


def label_subgraph(chart: Chart, m: int) -> LabelSubgraph:
    """Chains of label m with their taxonomy"""
    sub = LabelSubgraph(chart=chart, m=m)
    covered = set()
    kinds = chart.kinds
    for v, rotation in enumerate(chart.vertices):
        kind = kinds[v]
        if kind not in (VertexKind.WHITE, VertexKind.BLACK, VertexKind.BRANCH):
            continue
        mine = [d for d in rotation if chart.label(d) == m]
        if not mine:
            continue
        (sub.blacks if kind is VertexKind.BLACK else sub.whites).append(v)
        for d in mine:
            if d in covered:
                continue
            path, _ = chart.follow(d)
            end = chart.opposite[path[-1]]
            for x in path:
                covered.add(x)
                covered.add(chart.opposite[x])
            end_vertex = chart.vertex_of[end]
            end_black = kinds[end_vertex] is VertexKind.BLACK
            start_black = kind is VertexKind.BLACK
            crossings = sum(1 for x in path[1:] if kinds[chart.vertex_of[x]] is VertexKind.CROSSING)
            if start_black and end_black:
                chain_kind = 'free'
            elif start_black or end_black:
                chain_kind = 'terminal'
            elif end_vertex == v:
                chain_kind = 'loop'
            else:
                chain_kind = 'internal'
            sub.chains.append(Chain(chain_kind, tuple(path), d, end, crossings))

    for d in range(chart.dart_count):
        if d in covered or chart.label(d) != m:
            continue
        path, closed = chart.follow(d)
        if not closed:
            continue
        for x in path:
            covered.add(x)
            covered.add(chart.opposite[x])
        crossings = sum(1 for x in path if kinds[chart.vertex_of[x]] is VertexKind.CROSSING)
        sub.chains.append(Chain('ring' if crossings else 'hoop', tuple(path), None, None, crossings))
    sub.chains.sort(key=lambda c: c.key)
    return sub


# ----------------------------------------------------------------------
# Local queries at a vertex
# ----------------------------------------------------------------------

def orientation_at(chart: Chart, vertex: int, dart: int) -> str:
    """'inward' or 'outward' for the edge end `dart` at `vertex`"""
    if chart.vertex_of[dart] != vertex:
        raise ChartkitError(f"dart {dart} is not incident to vertex {vertex}")
    inward = chart.is_inward(dart)
    if inward is None:
        raise ChartkitError(f"edge of dart {dart} carries no orientation")
    return 'inward' if inward else 'outward'


def middle_at(chart: Chart, vertex: int) -> Tuple[int, int]:
    """(middle inward dart, middle outward dart) at a white vertex"""
    if chart.kinds[vertex] is not VertexKind.WHITE:
        raise ChartkitError(f"vertex {vertex} is not white")
    return middle_darts(chart, vertex)


def is_middle(chart: Chart, dart: int) -> bool:
    """Whether the edge end `dart` is a middle arc at its white vertex"""
    v = chart.vertex_of[dart]
    return chart.kinds[v] is VertexKind.WHITE and dart in middle_darts(chart, v)


@dataclass(frozen=True)
class NeighborNames:
    a_dart: int
    b_dart: int
    a_chain: Chain
    b_chain: Chain

    @property
    def same(self) -> bool:
        return self.a_chain.key == self.b_chain.key


def neighbor_names(chart: Chart, dart: int, vertex: int) -> NeighborNames:
    """The ends before and after `dart` anticlockwise around a white vertex, with their chains"""
    if chart.vertex_of[dart] != vertex:
        raise ChartkitError(f"dart {dart} is not incident to vertex {vertex}")
    before, after = chart.sigma(dart, -1), chart.sigma(dart, 1)
    a_chain = label_subgraph(chart, chart.label(before)).chain_at(before)
    b_chain = label_subgraph(chart, chart.label(after)).chain_at(after)
    return NeighborNames(before, after, a_chain, b_chain)


# ----------------------------------------------------------------------
# Skeletons
# ----------------------------------------------------------------------

@dataclass
class Skeleton:
    """Gamma_m as a partial chart; origin maps skeleton darts to chart darts"""
    chart: Chart
    m: int
    dart_origin: Dict[int, int] = field(default_factory=dict)
    vertex_origin: Dict[int, int] = field(default_factory=dict)


def skeleton(sub: LabelSubgraph) -> Skeleton:
    chart, m = sub.chart, sub.m
    blocked = {chart.edge_of[d] for c in sub.chains for d in c.darts}
    region_class: Dict[int, int] = {}
    for r in range(len(chart.regions)):
        if r in region_class:
            continue
        for reached in chart.flood_regions({r}, blocked):
            region_class[reached] = r

    editor = ChartEditor(chart.n)
    editor.infinity_tag = region_class.get(chart.infinity_face, 0)
    local: Dict[int, int] = {}
    origin: Dict[int, int] = {}
    for chain in sub.chains:
        if chain.start is not None:
            x, y = editor.new_dart(), editor.new_dart()
            inward = chart.is_inward(chain.end)
            head = None if inward is None else (y if inward else x)
            editor.link(x, y, m, head)
            editor.tag(x, region_class[chart.region_of(chain.start)])
            editor.tag(y, region_class[chart.region_of(chain.end)])
            local[chain.start], local[chain.end] = x, y
            origin[x], origin[y] = chain.start, chain.end
        else:
            p0 = chain.darts[0]
            a, b = editor.new_dart(), editor.new_dart()
            inward = chart.is_inward(chart.opposite[p0])
            head = None if inward is None else (b if inward else a)
            editor.link(a, b, m, head)
            editor.add_vertex([a, b])
            editor.tag(a, region_class[chart.region_of(p0)])
            editor.tag(b, region_class[chart.region_of(chart.opposite[p0])])
            origin[a], origin[b] = p0, chart.opposite[p0]

    vertex_local: Dict[int, int] = {}
    for v in sorted(sub.whites + sub.blacks):
        rotation = [local[d] for d in chart.vertices[v] if chart.label(d) == m]
        vertex_local[editor.add_vertex(rotation)] = v
    if editor.alpha:
        editor.set_infinity_fallback(min(editor.alpha))

    frozen, dart_map = editor.freeze(normalize=False)
    result = Skeleton(chart=frozen, m=m)
    result.dart_origin = {dart_map[d]: o for d, o in origin.items()}
    for local_vertex, v in vertex_local.items():
        first = editor.rotations[local_vertex][0]
        result.vertex_origin[frozen.vertex_of[dart_map[first]]] = v
    return result


def strip_orientation(chart: Chart) -> Chart:
    return replace(chart, edges=tuple(Edge(e.darts, e.label, None) for e in chart.edges))


@dataclass
class ComponentView:
    """One connected component as a chart of its own"""
    chart: Chart
    to_parent: List[int]


def split_components(chart: Chart) -> List[ComponentView]:
    views = []
    by_component: Dict[int, List[int]] = {}
    for d in range(chart.dart_count):
        by_component.setdefault(chart.component_of_dart(d), []).append(d)
    for comp in sorted(by_component):
        darts = by_component[comp]
        index = {d: i for i, d in enumerate(darts)}
        opposite = [index[chart.alpha(d)] for d in darts]
        vertices = [[index[d] for d in rotation] for v, rotation in enumerate(chart.vertices)
                    if chart.component_of_vertex[v] == comp]
        edges = [Edge(tuple(sorted(index[d] for d in e.darts)), e.label,
                      None if e.head is None else index[e.head])
                 for e in chart.edges if e.darts[0] in index]
        view = Chart.build(chart.n, opposite, vertices, edges)
        views.append(ComponentView(chart=view, to_parent=list(darts)))
    return views


# ----------------------------------------------------------------------
# BW normalisation
# ----------------------------------------------------------------------

@dataclass
class BWForm:
    """A skeleton whose BW-vertices carry a stub on both sides"""
    chart: Chart
    # BW vertex -> (original terminal dart, added stub dart)
    stubs: Dict[int, Tuple[int, int]] = field(default_factory=dict)
    # dart in this chart -> dart in the source skeleton (added stubs are absent)
    origin: Dict[int, int] = field(default_factory=dict)


def _bw_candidates(chart: Chart) -> List[Tuple[int, int]]:
    """(vertex, terminal dart) for trivalent vertices with exactly one univalent neighbour"""
    found = []
    for v, rotation in enumerate(chart.vertices):
        if len(rotation) != 3:
            continue
        terminals = [d for d in rotation if len(chart.vertices[chart.vertex_of[chart.alpha(d)]]) == 1]
        if len(terminals) == 1:
            found.append((v, terminals[0]))
    return found


def bw_normalize_chart(chart: Chart) -> BWForm:
    """Give every BW-vertex a second stub in the opposite gap; the side of the terminal stops mattering"""
    editor = ChartEditor.from_chart(chart)
    added: Dict[int, Tuple[int, int]] = {}
    for v, terminal in _bw_candidates(chart):
        _, x, y = editor.rotation(v)[editor.rotation(v).index(terminal):] + \
            editor.rotation(v)[:editor.rotation(v).index(terminal)]
        stub, black = editor.new_dart(), editor.new_dart()
        editor.link(stub, black, chart.label(terminal))
        editor.set_rotation(v, [terminal, x, stub, y])
        editor.add_vertex([black])
        added[v] = (terminal, stub)
    if chart.dart_count:
        editor.set_infinity_fallback(0)
    frozen, dart_map = editor.freeze(normalize=False)
    form = BWForm(chart=frozen)
    form.origin = {dart_map[d]: d for d in range(chart.dart_count)}
    for v, (terminal, stub) in added.items():
        new_v = frozen.vertex_of[dart_map[terminal]]
        form.stubs[new_v] = (dart_map[terminal], dart_map[stub])
    return form


def bw_expand(form: BWForm) -> Chart:
    """Drop the added stubs, restoring one of the two original local forms"""
    editor = ChartEditor.from_chart(form.chart)
    for _, stub in form.stubs.values():
        editor.remove_edge(stub)
    if form.chart.dart_count:
        editor.set_infinity_fallback(0)
    chart, _ = editor.freeze(normalize=False)
    return chart


def bw_normalize(sub: LabelSubgraph) -> BWForm:
    """BW-normal form of the skeleton of Gamma_m"""
    return bw_normalize_chart(skeleton(sub).chart)


# ----------------------------------------------------------------------
# Pattern catalog
# ----------------------------------------------------------------------

@dataclass
class Pattern:
    """Catalog shape prepared for matching"""
    id: str
    decorated: bool
    chart: Chart            # shape as written in the catalog
    prepared: Chart         # BW-normal and unoriented, or the oriented shape when decorated
    code: Tuple
    description: str = ''

    @property
    def white(self) -> int:
        return sum(1 for rotation in self.chart.vertices if len(rotation) == 3)

    @property
    def black(self) -> int:
        return sum(1 for rotation in self.chart.vertices if len(rotation) == 1)


def as_shape(chart: Chart) -> Chart:
    """Forget the label value: shapes compare as single-label maps"""
    return replace(chart, n=2, edges=tuple(Edge(e.darts, 1, e.head) for e in chart.edges))


def prepare_shape(chart: Chart, decorated: bool) -> Chart:
    if decorated:
        return as_shape(chart)
    return as_shape(strip_orientation(bw_normalize_chart(chart).chart))


def shape_code(chart: Chart, decorated: bool = False) -> Tuple:
    return canonical_code(prepare_shape(chart, decorated), ro_mode=True)


@lru_cache(maxsize=8)
def load_catalog(directory: Optional[str] = None) -> Tuple[Pattern, ...]:
    """Load every pattern listed in the catalog manifest"""
    from sketch import load_sketch

    directory = directory or CatalogConfig.CATALOG_DIR
    manifest_path = os.path.join(directory, 'manifest.json')
    try:
        with open(manifest_path, 'r', encoding='utf-8') as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ChartFormatError(f"cannot read catalog manifest {manifest_path}: {e}") from e

    patterns = []
    for entry in manifest.get('patterns', []):
        sketch = load_sketch(os.path.join(directory, entry['file']))
        decorated = bool(entry.get('decorated', False))
        prepared = prepare_shape(sketch.chart, decorated)
        patterns.append(Pattern(id=entry['id'], decorated=decorated, chart=sketch.chart,
                                prepared=prepared, code=canonical_code(prepared, ro_mode=True),
                                description=entry.get('description', '')))
    logger.info(f"Loaded {len(patterns)} catalog patterns from {directory}")
    return tuple(patterns)


def check_catalog(patterns: Sequence[Pattern]) -> List[Tuple[str, str]]:
    """Pairs of catalog ids that are RO-equivalent (should be empty)"""
    clashes = []
    for i, a in enumerate(patterns):
        for b in patterns[i + 1:]:
            if a.decorated == b.decorated and a.code == b.code:
                clashes.append((a.id, b.id))
    return clashes


@dataclass(frozen=True)
class PatternMatch:
    pattern: str
    variant: str
    component: int
    mapping: Dict[int, int]     # pattern dart -> chart dart (where the dart has a chart origin)

    def to_dict(self) -> Dict:
        return {'pattern': self.pattern, 'variant': self.variant, 'component': self.component,
                'mapping': {str(k): v for k, v in sorted(self.mapping.items())}}


def detect_patterns(sub: LabelSubgraph, catalog: Sequence[Pattern]) -> List[PatternMatch]:
    """Catalog shapes realised by connected components of Gamma_m"""
    skel = skeleton(sub)
    plain_views = split_components(skel.chart)
    bw = bw_normalize_chart(skel.chart)
    bw_views = split_components(strip_orientation(bw.chart))
    # components keep their order under BW normalisation: sort both by a source dart
    bw_by_source = {}
    for view in bw_views:
        sources = [bw.origin[d] for d in view.to_parent if d in bw.origin]
        bw_by_source[min(sources)] = view

    matches = []
    for index, plain in enumerate(plain_views):
        bw_view = bw_by_source.get(min(plain.to_parent))
        plain_shape = as_shape(plain.chart)
        bw_shape = as_shape(bw_view.chart) if bw_view else None
        plain_code = canonical_code(plain_shape, ro_mode=True)
        bw_code = canonical_code(bw_shape, ro_mode=True) if bw_view else None
        for pattern in catalog:
            if pattern.decorated:
                if pattern.code != plain_code:
                    continue
                iso = isomorphism(pattern.prepared, plain_shape, ro_mode=True)
                if iso is None:
                    continue
                mapping = {p: skel.dart_origin[plain.to_parent[c]] for p, c in iso.mapping.items()}
            else:
                if pattern.code != bw_code:
                    continue
                iso = isomorphism(pattern.prepared, bw_shape, ro_mode=True)
                if iso is None:
                    continue
                mapping = {}
                for p, c in iso.mapping.items():
                    source = bw.origin.get(bw_view.to_parent[c])
                    if source is not None:
                        mapping[p] = skel.dart_origin[source]
            matches.append(PatternMatch(pattern.id, iso.variant, index, mapping))
    matches.sort(key=lambda m: (m.pattern, m.component))
    return matches


def find_loops(sub: LabelSubgraph) -> List[Chain]:
    return sub.by_kind('loop')


def classify_shape(chart: Chart, catalog: Sequence[Pattern]) -> str:
    """Catalog id of an undecorated connected shape, or 'other'"""
    code = shape_code(chart)
    for pattern in catalog:
        if not pattern.decorated and pattern.code == code:
            return pattern.id
    return 'other'
