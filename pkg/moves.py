"""
Chart moves
Ходы на диаграммах

Local rewrites of charts: the elementary CI generators (M1, M2, R2, R3, R4),
CII and CIII. Every kind/direction pairs a candidate scan over the chart with
a surgery on a `ChartEditor`; the measure contract of each pair comes from
the schema table in data/move_schemas.json.
"""

import contextvars
import itertools
import json
import logging
import os
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Set, Tuple, Union

from canonical import canonical_form
from chart import Chart, VertexKind, inward_run, measures, middle_darts, validate
from config import CatalogConfig, DATA_DIR, SearchConfig
from editor import ChartEditor
from errors import ChartFormatError, ChartkitError, ContractViolation, MoveNotApplicable, SequenceAborted
from sketch import Sketch, load_sketch

logger = logging.getLogger(__name__)

# None means SearchConfig.MAX_FOLLOWERS
_follower_limit: contextvars.ContextVar[Optional[int]] = contextvars.ContextVar('follower_limit', default=None)

FORWARD = 'forward'
BACKWARD = 'backward'


class MoveKind(Enum):
    CI_M1 = 'CI_M1'
    CI_M2 = 'CI_M2'
    CI_R2 = 'CI_R2'
    CI_R3 = 'CI_R3'
    CI_R4 = 'CI_R4'
    CII = 'CII'
    CIII = 'CIII'


MoveType = Tuple[MoveKind, str]


@dataclass(frozen=True, order=True)
class MoveInstance:
    """One applicable local picture: kind, direction, anchor darts and parameters"""
    kind: str
    direction: str
    anchors: Tuple[int, ...]
    params: Tuple[Tuple[str, Any], ...] = ()

    @classmethod
    def make(cls, kind: MoveKind, direction: str, anchors: Iterable[int], **params) -> 'MoveInstance':
        return cls(kind.value, direction, tuple(anchors), tuple(sorted(params.items())))

    @property
    def move_type(self) -> MoveType:
        return MoveKind(self.kind), self.direction

    def param(self, name: str, default: Any = None) -> Any:
        return dict(self.params).get(name, default)

    @property
    def followers(self) -> Tuple[int, ...]:
        return tuple(self.param('followers', ()))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind,
            'direction': self.direction,
            'anchors': list(self.anchors),
            'params': {k: list(v) if isinstance(v, tuple) else v for k, v in self.params},
        }

    def __str__(self) -> str:
        extra = ''.join(f" {k}={v}" for k, v in self.params if v not in ((), None))
        return f"{self.kind}/{self.direction} at {list(self.anchors)}{extra}"


@dataclass(frozen=True)
class MoveSchema:
    kind: str
    direction: str
    inverse: Tuple[str, str]
    contract: Dict[str, Tuple[int, ...]]
    result_checks: Tuple[str, ...]
    label_constraints: str = ''
    before: str = ''
    after: str = ''
    degenerate: Tuple[str, ...] = ()


@lru_cache(maxsize=4)
def load_schemas(path: Optional[str] = None) -> Dict[MoveType, MoveSchema]:
    """Read the schema table; keys are (MoveKind, direction)"""
    path = path or CatalogConfig.SCHEMA_FILE
    try:
        with open(path, 'r', encoding='utf-8') as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ChartFormatError(f"cannot read move schemas from {path}: {e}") from e
    table: Dict[MoveType, MoveSchema] = {}
    for entry in doc.get('schemas', []):
        schema = MoveSchema(
            kind=entry['kind'],
            direction=entry['direction'],
            inverse=tuple(entry['inverse']),
            contract={k: tuple(v) for k, v in entry['contract'].items()},
            result_checks=tuple(entry.get('result_checks', [])),
            label_constraints=entry.get('label_constraints', ''),
            before=entry.get('before', ''),
            after=entry.get('after', ''),
            degenerate=tuple(entry.get('degenerate', [])),
        )
        table[(MoveKind(schema.kind), schema.direction)] = schema
    logger.debug(f"Loaded {len(table)} move schemas from {path}")
    return table


def inverse_type(move_type: MoveType) -> MoveType:
    schema = load_schemas()[move_type]
    kind, direction = schema.inverse
    return MoveKind(kind), direction


def move_types(kinds: Optional[Iterable[Union[str, MoveKind, MoveType]]] = None) -> List[MoveType]:
    """
    Resolve a kind selection to (kind, direction) pairs.

    Args:
        kinds: None for every registered pair; otherwise kinds, (kind, direction)
            pairs or strings such as "CIII" and "CI_M1:backward"
    """
    registered = sorted(_REGISTRY, key=lambda t: (t[0].value, t[1]))
    if kinds is None:
        return registered
    chosen: List[MoveType] = []
    for item in kinds:
        if isinstance(item, tuple):
            kind, direction = MoveKind(item[0]) if isinstance(item[0], str) else item[0], item[1]
            wanted = [(kind, direction)]
        else:
            if isinstance(item, MoveKind):
                name, direction = item.value, None
            else:
                name, _, direction = str(item).partition(':')
            try:
                kind = MoveKind(name)
            except ValueError:
                raise MoveNotApplicable(f"unknown move kind {name!r}", check='kind')
            wanted = [t for t in registered if t[0] is kind and (not direction or t[1] == direction)]
            if not wanted:
                raise MoveNotApplicable(f"move kind {name} has no direction {direction!r}", check='kind')
        for t in wanted:
            if t not in _REGISTRY:
                raise MoveNotApplicable(f"move kind {t[0].value} has no direction {t[1]!r}", check='kind')
            if t not in chosen:
                chosen.append(t)
    return chosen


# ----------------------------------------------------------------------
# Shared helpers
# ----------------------------------------------------------------------

def _region_components(chart: Chart, region: int, exclude: Set[int]) -> List[int]:
    """Cycle-minimum darts of the components facing a region, minus excluded components"""
    reps = []
    for c in chart.cycles_in_region(region):
        rep = min(chart.face_cycles[c])
        if chart.component_of_dart(rep) not in exclude:
            reps.append(rep)
    return sorted(reps)


def _follower_choices(chart: Chart, region: int, exclude: Set[int]) -> List[Tuple[int, ...]]:
    others = _region_components(chart, region, exclude)
    limit = _follower_limit.get()
    if limit is None:
        limit = SearchConfig.MAX_FOLLOWERS
    if len(others) > limit:
        logger.debug(f"Region {region} holds {len(others)} other components; offering none or all")
        return [(), tuple(others)]
    return [combo for size in range(len(others) + 1) for combo in itertools.combinations(others, size)]


def _single_cycle_region(chart: Chart, d: int) -> bool:
    return len(chart.cycles_in_region(chart.region_of(d))) == 1


def _head(inward: Optional[bool], if_inward: int, otherwise: int) -> Optional[int]:
    if inward is None:
        return None
    return if_inward if inward else otherwise


def _reroute(editor: ChartEditor, start: int, stops: List[Tuple[int, int]]):
    """Send the edge of start through new vertices; stops are (arriving dart, leaving dart)"""
    end = editor.alpha[start]
    label = editor.labels[start]
    inward = editor.is_inward(start)
    chain = [start] + [d for stop in stops for d in stop] + [end]
    for p, q in zip(chain[0::2], chain[1::2]):
        editor.link(p, q, label, _head(inward, p, q))


# ----------------------------------------------------------------------
# CI_M1: hoop birth and death
# ----------------------------------------------------------------------

def _candidates_m1_forward(chart: Chart) -> List[MoveInstance]:
    result = []
    for region in range(len(chart.regions)):
        for label in range(1, chart.n):
            for orientation in ('ccw', 'cw'):
                result.append(MoveInstance.make(MoveKind.CI_M1, FORWARD, (), region=region,
                                                label=label, orientation=orientation))
    return result


def _apply_m1_forward(chart: Chart, editor: ChartEditor, mv: MoveInstance):
    inner, outer = editor.new_dart(), editor.new_dart()
    head = inner if mv.param('orientation') == 'ccw' else outer
    editor.link(inner, outer, mv.param('label'), head)
    editor.add_vertex([inner, outer])
    editor.tag(outer, mv.param('region'))


def _candidates_m1_backward(chart: Chart) -> List[MoveInstance]:
    result = []
    for v in chart.vertices_of_kind(VertexKind.MARKER):
        for d in chart.vertices[v]:
            if _single_cycle_region(chart, d):
                result.append(MoveInstance.make(MoveKind.CI_M1, BACKWARD, (d,)))
    return result


def _apply_m1_backward(chart: Chart, editor: ChartEditor, mv: MoveInstance):
    d = mv.anchors[0]
    other = chart.alpha(d)
    for c in chart.cycles_in_region(chart.region_of(other)):
        if c != chart.cycle_of[other]:
            editor.set_infinity_fallback(chart.face_cycles[c][0])
            break
    editor.remove_vertex(chart.vertex_of[d])
    editor.remove_edge(d)


# ----------------------------------------------------------------------
# CI_M2: band surgery between two parallel arcs
# ----------------------------------------------------------------------

def _band_pairs(chart: Chart) -> Iterator[Tuple[int, int, int]]:
    """(region, x, y): darts of distinct same-label edges, both tails or both heads, facing one region"""
    by_region: Dict[int, List[int]] = defaultdict(list)
    for d in range(chart.dart_count):
        if chart.is_inward(d) is not None:
            by_region[chart.region_of(d)].append(d)
    for region in sorted(by_region):
        for x, y in itertools.combinations(by_region[region], 2):
            if chart.edge_of[x] == chart.edge_of[y] or chart.label(x) != chart.label(y):
                continue
            if chart.is_inward(x) != chart.is_inward(y):
                continue
            yield region, x, y


def _candidates_m2_forward(chart: Chart) -> List[MoveInstance]:
    result = []
    for region, x, y in _band_pairs(chart):
        if chart.cycle_of[x] != chart.cycle_of[y]:
            continue
        for followers in _follower_choices(chart, region, {chart.component_of_dart(x)}):
            result.append(MoveInstance.make(MoveKind.CI_M2, FORWARD, (x, y), followers=followers))
    for x in range(chart.dart_count):
        if chart.is_inward(x) is None:
            continue
        # the hoop sits on the side of x and encloses components from across the edge
        inner = chart.region_of(chart.alpha(x))
        for followers in _follower_choices(chart, inner, {chart.component_of_dart(x)}):
            result.append(MoveInstance.make(MoveKind.CI_M2, FORWARD, (x,), followers=followers))
    return result


def _candidates_m2_backward(chart: Chart) -> List[MoveInstance]:
    return [MoveInstance.make(MoveKind.CI_M2, BACKWARD, (x, y))
            for _, x, y in _band_pairs(chart) if chart.cycle_of[x] != chart.cycle_of[y]]


def _apply_m2(chart: Chart, editor: ChartEditor, mv: MoveInstance):
    if len(mv.anchors) == 1:
        x = mv.anchors[0]
        j1, j2 = editor.subdivide(x)
        editor.swap_pairing(x, j2)
        # j2 is the outer dart, parallel to x; j1 bounds the new region
        editor.split(j1, mv.followers)
        return
    x, y = mv.anchors
    for p, q in ((x, y), (y, x)):
        if chart.kinds[chart.vertex_of[p]] is VertexKind.MARKER:
            # the hoop dissolves into the edge of q; its far side joins the far side of q
            editor.retag(editor.tag_of(chart.alpha(p)), editor.tag_of(chart.alpha(q)))
    editor.swap_pairing(x, y)
    if mv.direction == FORWARD:
        editor.split(y, mv.followers)


# ----------------------------------------------------------------------
# CI_R2: bigon birth and death
# ----------------------------------------------------------------------

def _candidates_r2_forward(chart: Chart) -> List[MoveInstance]:
    result = []
    by_region: Dict[int, List[int]] = defaultdict(list)
    for d in range(chart.dart_count):
        by_region[chart.region_of(d)].append(d)
    for region in sorted(by_region):
        for d1, d2 in itertools.combinations(by_region[region], 2):
            if abs(chart.label(d1) - chart.label(d2)) < 2:
                continue
            choices = [()]
            if chart.cycle_of[d1] == chart.cycle_of[d2]:
                choices = _follower_choices(chart, region, {chart.component_of_dart(d1)})
            for followers in choices:
                result.append(MoveInstance.make(MoveKind.CI_R2, FORWARD, (d1, d2), followers=followers))
    return result


def _apply_r2_forward(chart: Chart, editor: ChartEditor, mv: MoveInstance):
    d1, d2 = mv.anchors
    x1, x2, x3, x4, y1, y2, y3, y4 = (editor.new_dart() for _ in range(8))
    _reroute(editor, d1, [(x1, x2), (y1, y2)])
    _reroute(editor, d2, [(y3, y4), (x3, x4)])
    editor.add_vertex([x2, x3, x1, x4])
    editor.add_vertex([y2, y4, y1, y3])
    if chart.cycle_of[d1] == chart.cycle_of[d2]:
        editor.split(d2, mv.followers)


def _candidates_r2_backward(chart: Chart) -> List[MoveInstance]:
    result = []
    for cycle in chart.face_cycles:
        if len(cycle) != 2:
            continue
        a, b = cycle
        va, vb = chart.vertex_of[a], chart.vertex_of[b]
        if va == vb or chart.kinds[va] is not VertexKind.CROSSING or chart.kinds[vb] is not VertexKind.CROSSING:
            continue
        if _single_cycle_region(chart, a):
            result.append(MoveInstance.make(MoveKind.CI_R2, BACKWARD, (min(cycle),)))
    return result


def _apply_r2_backward(chart: Chart, editor: ChartEditor, mv: MoveInstance):
    a = mv.anchors[0]
    b = chart.phi(a)
    editor.set_infinity_fallback(chart.sigma(a, 2))
    editor.split_crossing(chart.vertex_of[a])
    editor.split_crossing(chart.vertex_of[b])


# ----------------------------------------------------------------------
# CI_R3: a strand passes a crossing
# ----------------------------------------------------------------------

def _candidates_r3(chart: Chart) -> List[MoveInstance]:
    result = []
    for cycle in chart.face_cycles:
        if len(cycle) != 3:
            continue
        corners = {chart.vertex_of[d] for d in cycle}
        if len(corners) != 3 or any(chart.kinds[v] is not VertexKind.CROSSING for v in corners):
            continue
        if _single_cycle_region(chart, cycle[0]):
            result.append(MoveInstance.make(MoveKind.CI_R3, FORWARD, (min(cycle),)))
    return result


def _apply_r3(chart: Chart, editor: ChartEditor, mv: MoveInstance):
    a = mv.anchors[0]
    b = chart.phi(a)
    c = chart.phi(b)
    s = chart.sigma
    sa, s2a, sb, s2b, sc, s2c = s(a), s(a, 2), s(b), s(b, 2), s(c), s(c, 2)
    # strand directions are read off the outer darts before surgery
    flow_a, flow_b, flow_c = chart.is_inward(s2a), chart.is_inward(s2b), chart.is_inward(sa)
    for d in (a, b, c):
        editor.remove_vertex(chart.vertex_of[d])
    for d in (a, b, c):
        editor.remove_edge(d)
    n_yx, n_xy, n_yz, n_zy, n_xz, n_zx = (editor.new_dart() for _ in range(6))
    editor.link(n_yx, n_xy, chart.label(a), _head(flow_a, n_xy, n_yx))
    editor.link(n_yz, n_zy, chart.label(b), _head(flow_b, n_yz, n_zy))
    editor.link(n_xz, n_zx, chart.label(c), _head(flow_c, n_xz, n_zx))
    editor.add_vertex([n_yx, n_yz, s2a, sc])
    editor.add_vertex([sb, n_xz, n_xy, s2c])
    editor.add_vertex([s2b, sa, n_zy, n_zx])
    editor.set_infinity_fallback(n_zx)


# ----------------------------------------------------------------------
# CI_R4: a strand passes a white vertex
# ----------------------------------------------------------------------

def _r4_frame(chart: Chart, d0: int) -> Optional[Tuple[List[int], List[int], int, int]]:
    w = chart.vertex_of[d0]
    rotation = chart.vertices[w]
    k = rotation.index(d0)
    d = [rotation[(k + t) % 6] for t in range(6)]
    crossings = [chart.vertex_of[chart.alpha(d[t])] for t in range(3)]
    if len(set(crossings)) != 3 or any(chart.kinds[v] is not VertexKind.CROSSING for v in crossings):
        return None
    y1 = chart.sigma(chart.alpha(d[1]))
    y2 = chart.sigma(chart.alpha(d[2]))
    if chart.vertex_of[chart.alpha(y1)] != crossings[0] or chart.sigma(chart.alpha(y1)) != chart.alpha(d[0]):
        return None
    if chart.vertex_of[chart.alpha(y2)] != crossings[1] or chart.sigma(chart.alpha(y2)) != chart.alpha(d[1]):
        return None
    if not (_single_cycle_region(chart, d[1]) and _single_cycle_region(chart, d[2])):
        return None
    return d, crossings, y1, y2


def _candidates_r4(chart: Chart) -> List[MoveInstance]:
    result = []
    for w in chart.vertices_of_kind(VertexKind.WHITE):
        for d0 in chart.vertices[w]:
            if _r4_frame(chart, d0) is not None:
                result.append(MoveInstance.make(MoveKind.CI_R4, FORWARD, (d0,)))
    return result


def _apply_r4(chart: Chart, editor: ChartEditor, mv: MoveInstance):
    frame = _r4_frame(chart, mv.anchors[0])
    if frame is None:
        raise MoveNotApplicable(f"{mv} has no fan of empty triangles", check='pattern')
    d, crossings, y1, y2 = frame
    outer = [chart.sigma(chart.alpha(d[t]), 2) for t in range(3)]
    l_in = chart.sigma(chart.alpha(d[0]))
    l_out = chart.sigma(chart.alpha(d[2]), 3)
    label = chart.label(l_in)
    flow = chart.is_inward(l_in)

    for t in range(3):
        editor.remove_vertex(crossings[t])
        editor.add_vertex([chart.alpha(d[t]), outer[t]])
    editor.remove_edge(y1)
    editor.remove_edge(y2)

    cuts = {s: editor.subdivide(d[s]) for s in (3, 4, 5)}
    f5, b4, f4, b3 = (editor.new_dart() for _ in range(4))
    for s, back, ahead in ((5, l_in, f5), (4, b4, f4), (3, b3, l_out)):
        j1, j2 = cuts[s]
        editor.set_rotation(editor.vertex[j1], [j2, back, j1, ahead])
    editor.link(f5, b4, label, _head(flow, b4, f5))
    editor.link(f4, b3, label, _head(flow, b3, f4))
    editor.fresh(d[4], d[5], cuts[3][0], cuts[4][0])


# ----------------------------------------------------------------------
# CII: a black vertex passes an edge
# ----------------------------------------------------------------------

def _candidates_cii_forward(chart: Chart) -> List[MoveInstance]:
    result = []
    for v in chart.vertices_of_kind(VertexKind.BLACK):
        beta = chart.vertices[v][0]
        region = chart.region_of(beta)
        for d in range(chart.dart_count):
            if chart.region_of(d) != region or chart.edge_of[d] == chart.edge_of[beta]:
                continue
            if abs(chart.label(d) - chart.label(beta)) < 2:
                continue
            choices = [()]
            if chart.cycle_of[d] == chart.cycle_of[beta]:
                choices = _follower_choices(chart, region, {chart.component_of_dart(beta)})
            for followers in choices:
                result.append(MoveInstance.make(MoveKind.CII, FORWARD, (beta, d), followers=followers))
    return result


def _apply_cii_forward(chart: Chart, editor: ChartEditor, mv: MoveInstance):
    beta, d = mv.anchors
    t = chart.alpha(beta)
    label = chart.label(beta)
    flow = chart.is_inward(beta)
    j1, j2 = editor.subdivide(d)
    k_b, k_u = editor.new_dart(), editor.new_dart()
    editor.set_rotation(editor.vertex[j1], [j2, k_b, j1, k_u])
    editor.link(t, k_u, label, _head(flow, k_u, t))
    editor.link(k_b, beta, label, _head(flow, beta, k_b))
    editor.fresh(beta)
    if chart.cycle_of[d] == chart.cycle_of[beta]:
        editor.split(j2, mv.followers)


def _candidates_cii_backward(chart: Chart) -> List[MoveInstance]:
    result = []
    for v in chart.vertices_of_kind(VertexKind.BLACK):
        beta = chart.vertices[v][0]
        if chart.kinds[chart.vertex_of[chart.alpha(beta)]] is VertexKind.CROSSING:
            result.append(MoveInstance.make(MoveKind.CII, BACKWARD, (beta,)))
    return result


def _apply_cii_backward(chart: Chart, editor: ChartEditor, mv: MoveInstance):
    beta = mv.anchors[0]
    editor.fresh(beta)
    editor.split_crossing(chart.vertex_of[chart.alpha(beta)])


# ----------------------------------------------------------------------
# CIII: a black vertex passes a white vertex
# ----------------------------------------------------------------------

def _candidates_ciii_forward(chart: Chart) -> List[MoveInstance]:
    result = []
    for w in chart.vertices_of_kind(VertexKind.WHITE):
        middle = middle_darts(chart, w)
        for d in chart.vertices[w]:
            if d in middle:
                continue
            if chart.kinds[chart.vertex_of[chart.alpha(d)]] is VertexKind.BLACK:
                result.append(MoveInstance.make(MoveKind.CIII, FORWARD, (d,)))
    return result


def _apply_ciii_forward(chart: Chart, editor: ChartEditor, mv: MoveInstance):
    d0 = mv.anchors[0]
    w = chart.vertex_of[d0]
    rotation = chart.vertices[w]
    s = rotation.index(d0)
    d = [rotation[(s + t) % 6] for t in range(6)]
    editor.remove_vertex(w)
    editor.remove_vertex(chart.vertex_of[chart.alpha(d0)])
    editor.remove_edge(d0)
    editor.add_vertex([d[1], d[5]])
    editor.add_vertex([d[2], d[4]])
    editor.add_vertex([d[3]])
    editor.set_infinity_fallback(d[1])


def _candidates_ciii_backward(chart: Chart) -> List[MoveInstance]:
    result = []
    arcs = [d for d in range(chart.dart_count) if chart.is_inward(d) is not None]
    for v in chart.vertices_of_kind(VertexKind.BLACK):
        beta = chart.vertices[v][0]
        label = chart.label(beta)
        west = chart.region_of(beta)
        for x in arcs:
            if chart.region_of(x) != west or abs(chart.label(x) - label) != 1:
                continue
            if chart.edge_of[x] == chart.edge_of[beta]:
                continue
            strip = chart.region_of(chart.alpha(x))
            for y in arcs:
                if chart.region_of(y) != strip or chart.label(y) != label:
                    continue
                inner, outer = bool(chart.is_inward(x)), bool(chart.is_inward(y))
                for terminal in ('in', 'out'):
                    flags = [terminal == 'in', not outer, not inner, bool(chart.is_inward(beta)), inner, outer]
                    if inward_run(flags) is None:
                        continue
                    strip_choices = [()]
                    if chart.cycle_of[chart.alpha(x)] == chart.cycle_of[y]:
                        strip_choices = _follower_choices(chart, strip, {chart.component_of_dart(x)})
                    west_choices = [()]
                    if chart.cycle_of[x] == chart.cycle_of[beta]:
                        west_choices = _follower_choices(chart, west, {chart.component_of_dart(x)})
                    for strip_followers, west_followers in itertools.product(strip_choices, west_choices):
                        result.append(MoveInstance.make(
                            MoveKind.CIII, BACKWARD, (beta, x, y), terminal=terminal,
                            strip=strip_followers, west=west_followers))
    return result


def _apply_ciii_backward(chart: Chart, editor: ChartEditor, mv: MoveInstance):
    beta, x, y = mv.anchors
    j1, j2 = editor.subdivide(x)
    k1, k2 = editor.subdivide(y)
    editor.remove_vertex(editor.vertex[j1])
    editor.remove_vertex(editor.vertex[k1])
    editor.remove_vertex(chart.vertex_of[beta])
    e, tip = editor.new_dart(), editor.new_dart()
    editor.link(e, tip, chart.label(x), e if mv.param('terminal') == 'in' else tip)
    editor.add_vertex([e, k1, j1, beta, j2, k2])
    editor.add_vertex([tip])
    editor.tag(e, editor.tag_of(k1))
    if chart.cycle_of[chart.alpha(x)] == chart.cycle_of[y]:
        editor.split(k2, mv.param('strip', ()))
    if chart.cycle_of[x] == chart.cycle_of[beta]:
        editor.split(j2, mv.param('west', ()))


_Candidates = Callable[[Chart], List[MoveInstance]]
_Surgery = Callable[[Chart, ChartEditor, MoveInstance], None]

_REGISTRY: Dict[MoveType, Tuple[_Candidates, _Surgery]] = {
    (MoveKind.CI_M1, FORWARD): (_candidates_m1_forward, _apply_m1_forward),
    (MoveKind.CI_M1, BACKWARD): (_candidates_m1_backward, _apply_m1_backward),
    (MoveKind.CI_M2, FORWARD): (_candidates_m2_forward, _apply_m2),
    (MoveKind.CI_M2, BACKWARD): (_candidates_m2_backward, _apply_m2),
    (MoveKind.CI_R2, FORWARD): (_candidates_r2_forward, _apply_r2_forward),
    (MoveKind.CI_R2, BACKWARD): (_candidates_r2_backward, _apply_r2_backward),
    (MoveKind.CI_R3, FORWARD): (_candidates_r3, _apply_r3),
    (MoveKind.CI_R4, FORWARD): (_candidates_r4, _apply_r4),
    (MoveKind.CII, FORWARD): (_candidates_cii_forward, _apply_cii_forward),
    (MoveKind.CII, BACKWARD): (_candidates_cii_backward, _apply_cii_backward),
    (MoveKind.CIII, FORWARD): (_candidates_ciii_forward, _apply_ciii_forward),
    (MoveKind.CIII, BACKWARD): (_candidates_ciii_backward, _apply_ciii_backward),
}


# ----------------------------------------------------------------------
# Application and contracts
# ----------------------------------------------------------------------

def measure_delta(before: Chart, after: Chart) -> Dict[str, int]:
    mb, ma = measures(before), measures(after)
    return {
        'w': ma.w - mb.w,
        'f': ma.f - mb.f,
        'c': ma.c - mb.c,
        'b': ma.b - mb.b,
        'components': after.component_count - before.component_count,
    }


def _realize(chart: Chart, mv: MoveInstance) -> Tuple[Chart, Dict[int, int]]:
    _, surgery = _REGISTRY[mv.move_type]
    editor = ChartEditor.from_chart(chart)
    try:
        surgery(chart, editor, mv)
        result, index = editor.freeze()
    except MoveNotApplicable:
        raise
    except ChartkitError as e:
        raise ContractViolation(f"{mv} broke the chart during surgery: {e}") from e
    dart_map = {d: index[d] for d in range(chart.dart_count) if d in index}
    return result, dart_map


def _audit(chart: Chart, result: Chart, mv: MoveInstance) -> Dict[str, int]:
    report = validate(result)
    if not report.is_valid:
        raise ContractViolation(f"{mv} produced an invalid chart: {', '.join(sorted(report.codes))}")
    schema = load_schemas()[mv.move_type]
    delta = measure_delta(chart, result)
    for key, allowed in schema.contract.items():
        if delta[key] in allowed:
            continue
        if key in schema.result_checks:
            raise MoveNotApplicable(f"{mv} would change {key} by {delta[key]}", check=key)
        raise ContractViolation(f"{mv} changed {key} by {delta[key]}, contract allows {list(allowed)}")
    return delta


def expand_moves(chart: Chart, kinds=None) -> Iterator[Tuple[MoveInstance, Chart, Dict[str, int]]]:
    """Yield (instance, result, measure delta) for every applicable instance in sorted order"""
    for move_type in move_types(kinds):
        candidates, _ = _REGISTRY[move_type]
        for mv in sorted(candidates(chart)):
            try:
                result, _ = _realize(chart, mv)
                delta = _audit(chart, result, mv)
            except (MoveNotApplicable, ContractViolation) as e:
                logger.debug(f"Skipping {mv}: {e}")
                continue
            yield mv, result, delta


def enumerate_moves(chart: Chart, kinds=None) -> List[MoveInstance]:
    """Every applicable instance of the requested kinds, sorted"""
    return sorted(mv for mv, _, _ in expand_moves(chart, kinds))


def apply_move_tracked(chart: Chart, mv: MoveInstance) -> Tuple[Chart, Dict[int, int], Dict[str, int]]:
    """
    Apply one instance.

    Returns:
        the result, the map from surviving input darts to result darts, and
        the measure delta
    """
    try:
        move_type = mv.move_type
    except ValueError:
        raise MoveNotApplicable(f"unknown move kind {mv.kind!r}", check='kind')
    if move_type not in _REGISTRY:
        raise MoveNotApplicable(f"move kind {mv.kind} has no direction {mv.direction!r}", check='kind')
    candidates, _ = _REGISTRY[move_type]
    if mv not in set(candidates(chart)):
        raise MoveNotApplicable(f"{mv} does not match its local pattern", check='pattern')
    result, dart_map = _realize(chart, mv)
    try:
        delta = _audit(chart, result, mv)
    except ContractViolation as e:
        logger.error(f"Contract violation: {e}")
        raise
    return result, dart_map, delta


def apply_move(chart: Chart, mv: MoveInstance) -> Chart:
    return apply_move_tracked(chart, mv)[0]


def find_inverse(original: Chart, result: Chart, mv: MoveInstance,
                 max_followers: int = 8) -> Optional[MoveInstance]:
    """
    An instance of the inverse type on result leading back to the canonical form of original.

    Split moves may hand any subset of up to max_followers components to the new region.
    """
    target = canonical_form(original)
    token = _follower_limit.set(max_followers)
    try:
        for candidate, back, _ in expand_moves(result, [inverse_type(mv.move_type)]):
            if canonical_form(back) == target:
                return candidate
    finally:
        _follower_limit.reset(token)
    return None


@dataclass
class StepRecord:
    index: int
    kind: str
    direction: str
    delta: Dict[str, int]

    def to_dict(self) -> Dict[str, Any]:
        return {'index': self.index, 'kind': self.kind, 'direction': self.direction, 'delta': dict(self.delta)}


@dataclass
class SequenceResult:
    chart: Chart
    steps: List[StepRecord] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {'steps': [s.to_dict() for s in self.steps], 'measures': measures(self.chart).to_dict()}


def apply_sequence(chart: Chart, seq: Iterable[MoveInstance]) -> SequenceResult:
    """Apply moves in order with per-step validation; the first failing step aborts"""
    result = SequenceResult(chart=chart)
    for index, mv in enumerate(seq):
        try:
            chart, _, delta = apply_move_tracked(chart, mv)
        except (MoveNotApplicable, ContractViolation) as e:
            raise SequenceAborted(f"step {index} ({mv}) failed: {e}", index, e) from e
        result.steps.append(StepRecord(index, mv.kind, mv.direction, delta))
        result.chart = chart
    return result


# ----------------------------------------------------------------------
# Move scripts
# ----------------------------------------------------------------------

def footprint(chart: Chart, mv: MoveInstance) -> Set[int]:
    """Darts a script selector may use to pick out this instance"""
    darts = set(mv.anchors) | {chart.alpha(d) for d in mv.anchors}
    kind = MoveKind(mv.kind)
    if kind is MoveKind.CI_M1 and mv.direction == FORWARD:
        darts |= {d for d in range(chart.dart_count) if chart.region_of(d) == mv.param('region')}
    elif kind is MoveKind.CI_R3 or (kind is MoveKind.CI_R2 and mv.direction == BACKWARD):
        cycle = chart.face_cycles[chart.cycle_of[mv.anchors[0]]]
        darts |= set(cycle) | {chart.alpha(d) for d in cycle}
    elif kind is MoveKind.CI_R4 or (kind is MoveKind.CIII and mv.direction == FORWARD):
        darts |= set(chart.vertices[chart.vertex_of[mv.anchors[0]]])
    return darts


@dataclass
class ScriptStep:
    kind: str
    direction: str
    darts: List[Tuple[str, str]]
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass
class MoveScript:
    name: str
    base: Sketch
    steps: List[ScriptStep]
    expect: Dict[str, Any] = field(default_factory=dict)


def load_script(path: str) -> MoveScript:
    """
    Read a move script: {"base": sketch path relative to the data directory,
    "steps": [{"kind", "direction", "select": {"darts": [{"edge", "end"}], "params": {}}}],
    "expect": {...}}
    """
    try:
        with open(path, 'r', encoding='utf-8') as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ChartFormatError(f"cannot read move script {path}: {e}") from e
    base_path = doc.get('base', '')
    if not os.path.isabs(base_path):
        base_path = os.path.join(DATA_DIR, base_path)
    steps = []
    for entry in doc.get('steps', []):
        select = entry.get('select', {})
        steps.append(ScriptStep(
            kind=entry['kind'],
            direction=entry.get('direction', FORWARD),
            darts=[(ref['edge'], ref.get('end', 'tail')) for ref in select.get('darts', [])],
            params=dict(select.get('params', {})),
        ))
    return MoveScript(name=doc.get('name', os.path.basename(path)), base=load_sketch(base_path),
                      steps=steps, expect=dict(doc.get('expect', {})))


def _initial_names(sketch: Sketch) -> Dict[Tuple[str, str], int]:
    names = {}
    for edge, (tail, head) in sketch.names.edges.items():
        names[(edge, 'tail')] = tail
        names[(edge, 'head')] = head
    for hoop, (inner, outer) in sketch.names.hoops.items():
        names[(hoop, 'inner')] = inner
        names[(hoop, 'outer')] = outer
    return names


def _params_match(mv: MoveInstance, wanted: Dict[str, Any]) -> bool:
    for key, value in wanted.items():
        have = mv.param(key)
        if isinstance(have, tuple):
            have = list(have)
        if have != value:
            return False
    return True


def replay_script(script: MoveScript) -> SequenceResult:
    """Resolve each step against the current chart through the tracked name table and apply it"""
    chart = script.base.chart
    names = _initial_names(script.base)
    result = SequenceResult(chart=chart)
    for index, step in enumerate(script.steps):
        try:
            selected = {names[ref] for ref in step.darts}
        except KeyError as e:
            raise SequenceAborted(f"step {index} names {e.args[0]} which no longer exists", index)
        match = None
        for mv, _, _ in expand_moves(chart, [f"{step.kind}:{step.direction}"]):
            if selected <= footprint(chart, mv) and _params_match(mv, step.params):
                match = mv
                break
        if match is None:
            raise SequenceAborted(f"step {index}: no {step.kind}/{step.direction} instance matches", index)
        try:
            chart, dart_map, delta = apply_move_tracked(chart, match)
        except (MoveNotApplicable, ContractViolation) as e:
            raise SequenceAborted(f"step {index} ({match}) failed: {e}", index, e) from e
        names = {ref: dart_map[d] for ref, d in names.items() if d in dart_map}
        result.steps.append(StepRecord(index, match.kind, match.direction, delta))
        result.chart = chart
        logger.info(f"Script {script.name}: step {index} {match} -> {delta}")
    return result
