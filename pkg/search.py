"""
Skeleton enumeration and reduction search
Перечисление скелетов и поиск упрощений

Skeletons are connected shapes of trivalent and univalent vertices on the
sphere. They grow from the circle and the free edge by three insertions:
a leaf on one side of an edge, an edge across a face, and a loop on a
leaf. Removing a leaf, a non-bridge edge or a loop undoes them, so every
shape is reached.

Reduction runs a breadth-first search over C-move orbits. Each layer is
expanded in a thread pool and merged in a fixed order; states are
deduplicated by canonical form in a StateStore. The first layer holding a
chart of smaller complexity ends the search with its lexicographically least
path. In greedy mode the search instead keeps the best chart of that layer,
restarts from it and returns the whole chain of moves as one certificate.
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from canonical import canonical_form, form_digest
from chart import Chart, Measures, VertexKind, chart_from_dict, measures
from config import SearchConfig
from editor import ChartEditor
from errors import BudgetError, ChartFormatError, SequenceAborted
from moves import BACKWARD, FORWARD, MoveInstance, MoveKind, apply_sequence, expand_moves, move_types
from store import StateStore
from structure import Pattern, as_shape, classify_shape, shape_code

logger = logging.getLogger(__name__)

SHAPE_LABEL = 1


# ----------------------------------------------------------------------
# Skeleton enumeration
# ----------------------------------------------------------------------

@dataclass
class SkeletonClass:
    """One shape up to reflection, orientation and the side of BW stubs"""
    chart: Chart
    white: int
    black: int
    loop_free: bool
    code: Tuple = field(repr=False)
    digest: str = ''
    tag: str = 'other'

    def to_dict(self) -> Dict[str, Any]:
        return {
            'white': self.white,
            'black': self.black,
            'loop_free': self.loop_free,
            'tag': self.tag,
            'digest': self.digest,
            'chart': self.chart.to_dict(),
        }


def _base_shapes() -> List[Chart]:
    circle = ChartEditor(2)
    a, b = circle.new_edge(SHAPE_LABEL)
    circle.add_vertex([a, b])
    free = ChartEditor(2)
    a, b = free.new_edge(SHAPE_LABEL)
    free.add_vertex([a])
    free.add_vertex([b])
    return [circle.freeze_connected()[0], free.freeze_connected()[0]]


def _branch_on(editor: ChartEditor, d: int) -> int:
    """Subdivide the edge of d and open a third dart on the right of d; returns that dart"""
    j1, j2 = editor.subdivide(d)
    x = editor.new_dart()
    editor.set_rotation(editor.vertex[j1], [j1, x, j2])
    return x


def _with_leaf(chart: Chart, d: int) -> Chart:
    editor = ChartEditor.from_chart(chart)
    x = _branch_on(editor, d)
    y = editor.new_dart()
    editor.link(x, y, SHAPE_LABEL)
    editor.add_vertex([y])
    return editor.freeze_connected()[0]


def _with_chord(chart: Chart, p: int, q: int) -> Chart:
    editor = ChartEditor.from_chart(chart)
    if p == q:
        j1, j2 = editor.subdivide(p)
        x = editor.new_dart()
        editor.set_rotation(editor.vertex[j1], [j1, x, j2])
        y = _branch_on(editor, j2)
    else:
        x = _branch_on(editor, p)
        y = _branch_on(editor, q)
    editor.link(x, y, SHAPE_LABEL)
    return editor.freeze_connected()[0]


def _with_loop(chart: Chart, v: int) -> Chart:
    editor = ChartEditor.from_chart(chart)
    (e,) = editor.rotation(v)
    l1, l2 = editor.new_edge(SHAPE_LABEL)
    editor.set_rotation(v, [e, l1, l2])
    return editor.freeze_connected()[0]


def grow(chart: Chart, target_white: Optional[int] = None) -> List[Chart]:
    """Every shape one insertion away; target_white keeps only results with that many branch vertices"""
    w = len(chart.vertices_of_kind(VertexKind.BRANCH))
    children = []
    if target_white in (None, w + 1):
        for d in range(chart.dart_count):
            children.append(_with_leaf(chart, d))
        for v in chart.vertices_of_kind(VertexKind.BLACK):
            children.append(_with_loop(chart, v))
    if target_white in (None, w + 2):
        for cycle in chart.face_cycles:
            for i, p in enumerate(cycle):
                for q in cycle[i:]:
                    children.append(_with_chord(chart, p, q))
    return children


def shape_form(chart: Chart) -> bytes:
    """RO canonical form of a shape, labels and orientations forgotten"""
    return canonical_form(as_shape(chart), ro_mode=True)


def _is_loop_free(chart: Chart) -> bool:
    for edge in chart.edges:
        a, b = edge.darts
        if chart.vertex_of[a] == chart.vertex_of[b] and chart.kinds[chart.vertex_of[a]] is VertexKind.BRANCH:
            return False
    return True


class ShapeLevels:
    """Distinct connected shapes by number of branch vertices, grown on demand"""

    def __init__(self, workers: Optional[int] = None):
        self.workers = max(1, workers or SearchConfig.WORKERS)
        self.levels: Dict[int, List[Chart]] = {0: _base_shapes()}

    def _level(self, w: int) -> List[Chart]:
        if w < 0:
            return []
        if w in self.levels:
            return self.levels[w]
        sources = self._level(w - 1) + self._level(w - 2)
        grown: List[Tuple[int, List[Chart]]] = []
        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            futures = {executor.submit(grow, chart, w): i for i, chart in enumerate(sources)}
            for future in as_completed(futures):
                grown.append((futures[future], future.result()))
        grown.sort(key=lambda item: item[0])
        distinct: Dict[bytes, Chart] = {}
        for _, children in grown:
            for child in children:
                distinct.setdefault(shape_form(child), child)
        self.levels[w] = [distinct[form] for form in sorted(distinct)]
        logger.info(f"Shapes with {w} branch vertices: {len(self.levels[w])}")
        return self.levels[w]

    def shapes(self, w: int) -> List[Chart]:
        return self._level(w)


def enumerate_skeletons(white: int, no_loop: bool = False, min_component_w: Optional[int] = None,
                        catalog: Sequence[Pattern] = (), store: Optional[StateStore] = None,
                        levels: Optional[ShapeLevels] = None) -> List[SkeletonClass]:
    """
    Connected skeleton classes with exactly `white` trivalent vertices.

    Args:
        white: number of trivalent vertices
        no_loop: drop shapes with an edge from a vertex to itself
        min_component_w: drop shapes with fewer trivalent vertices (except none)
        catalog: patterns used to tag the classes
        store: optional store that records every class
        levels: shared shape cache across calls

    Returns:
        classes sorted by (black, digest)
    """
    if white < 0 or white > SearchConfig.MAX_WHITE:
        raise BudgetError(f"skeleton enumeration is limited to 0..{SearchConfig.MAX_WHITE} white vertices, "
                          f"got {white}")
    if min_component_w is not None and 0 < white < min_component_w:
        return []
    levels = levels or ShapeLevels()
    classes: Dict[Tuple, SkeletonClass] = {}
    for chart in levels.shapes(white):
        loop_free = _is_loop_free(chart)
        if no_loop and not loop_free:
            continue
        code = shape_code(chart)
        if code in classes:
            continue
        black = len(chart.vertices_of_kind(VertexKind.BLACK))
        form = json.dumps(code, separators=(',', ':')).encode('utf-8')
        classes[code] = SkeletonClass(chart=chart, white=white, black=black, loop_free=loop_free,
                                      code=code, digest=form_digest(form),
                                      tag=classify_shape(chart, catalog) if catalog else 'other')
    result = sorted(classes.values(), key=lambda c: (c.black, c.digest))
    if store is not None:
        for cls in result:
            store.add_skeleton(cls.digest, cls.white, cls.black, cls.loop_free, cls.tag, cls.chart.to_dict())
    logger.info(f"Enumerated {len(result)} skeleton classes with {white} white vertices")
    return result


# ----------------------------------------------------------------------
# Reduction search
# ----------------------------------------------------------------------

DEFAULT_KINDS = [t for t in move_types() if t != (MoveKind.CI_M1, FORWARD)]


@dataclass
class ReductionCertificate:
    initial: Chart
    moves: List[MoveInstance]
    final: Chart
    before: Measures
    after: Measures
    states: int = 0
    rounds: int = 0

    def verify(self) -> bool:
        """Replay the moves and compare the final canonical form and complexity"""
        try:
            replay = apply_sequence(self.initial, self.moves)
        except SequenceAborted as e:
            logger.error(f"Certificate replay failed: {e}")
            return False
        if canonical_form(replay.chart) != canonical_form(self.final):
            return False
        return measures(replay.chart).complexity < self.before.complexity

    def to_dict(self) -> Dict[str, Any]:
        return {
            'status': 'certificate',
            'initial': self.initial.to_dict(),
            'steps': [mv.to_dict() for mv in self.moves],
            'final': self.final.to_dict(),
            'before': self.before.to_dict(),
            'after': self.after.to_dict(),
            'states': self.states,
            'rounds': self.rounds,
        }


@dataclass
class Exhausted:
    """Budget spent or orbit closed without an improvement; certifies nothing"""
    reason: str                 # depth, states or closed
    states: int
    depth: int
    frontier: int
    measures: Measures

    def to_dict(self) -> Dict[str, Any]:
        return {
            'status': 'exhausted',
            'reason': self.reason,
            'states': self.states,
            'depth': self.depth,
            'frontier': self.frontier,
            'measures': self.measures.to_dict(),
        }


def instance_from_dict(doc: Dict[str, Any]) -> MoveInstance:
    params = {k: tuple(v) if isinstance(v, list) else v for k, v in doc.get('params', {}).items()}
    direction = doc.get('direction', FORWARD)
    if direction not in (FORWARD, BACKWARD):
        raise ChartFormatError(f"unknown move direction {direction!r}")
    return MoveInstance.make(MoveKind(doc['kind']), direction, doc.get('anchors', []), **params)


def load_certificate(path: str) -> ReductionCertificate:
    try:
        with open(path, 'r', encoding='utf-8') as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ChartFormatError(f"cannot read certificate {path}: {e}") from e
    if doc.get('status') != 'certificate':
        raise ChartFormatError(f"{path} is not a reduction certificate")
    initial, final = chart_from_dict(doc['initial']), chart_from_dict(doc['final'])
    return ReductionCertificate(initial=initial, moves=[instance_from_dict(s) for s in doc['steps']],
                                final=final, before=measures(initial), after=measures(final),
                                states=doc.get('states', 0), rounds=doc.get('rounds', 0))


@dataclass
class _State:
    chart: Chart
    path: Tuple[MoveInstance, ...]


def _expand(chart: Chart, kinds) -> List[Tuple[MoveInstance, Chart]]:
    return [(mv, result) for mv, result, _ in expand_moves(chart, kinds)]


def _search_round(start: Chart, kinds, max_states: int, max_depth: int, workers: int,
                  store: StateStore, greedy: bool = False) -> Tuple[Optional[_State], Exhausted]:
    """
    One BFS from start.

    Returns:
        the improving state of the first layer that has one: the least path,
        or with greedy the least complexity, ties broken by path
    """
    store.clear()
    base = measures(start)
    store.add_if_absent(canonical_form(start), 0, base.w, base.f)
    stored = 1
    frontier = [_State(start, ())]
    depth = 0
    while frontier and depth < max_depth:
        depth += 1
        expanded: List[Tuple[int, List[Tuple[MoveInstance, Chart]]]] = []
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(_expand, state.chart, kinds): i for i, state in enumerate(frontier)}
            for future in as_completed(futures):
                expanded.append((futures[future], future.result()))
        expanded.sort(key=lambda item: item[0])

        next_frontier: List[_State] = []
        best: Optional[_State] = None
        full = False
        for index, successors in expanded:
            parent = frontier[index]
            for mv, result in successors:
                m = measures(result)
                if not store.add_if_absent(canonical_form(result), depth, m.w, m.f):
                    continue
                stored += 1
                state = _State(result, parent.path + (mv,))
                next_frontier.append(state)
                if m.complexity < base.complexity:
                    if best is None:
                        best = state
                    elif greedy and (m.complexity, state.path) < (measures(best.chart).complexity, best.path):
                        best = state
                    elif not greedy and state.path < best.path:
                        best = state
                if stored >= max_states:
                    full = True
                    break
            if full:
                break
        logger.info(f"Depth {depth}: {len(next_frontier)} new states, {stored} stored")
        if best is not None:
            return best, Exhausted('improved', stored, depth, len(next_frontier), base)
        if full:
            return None, Exhausted('states', stored, depth, len(next_frontier), base)
        frontier = next_frontier
    reason = 'depth' if frontier else 'closed'
    return None, Exhausted(reason, stored, depth, len(frontier), base)


def reduce(chart: Chart, max_states: Optional[int] = None, max_depth: Optional[int] = None,
           kinds: Optional[Iterable[Union[str, MoveKind, Tuple]]] = None, workers: Optional[int] = None,
           store: Optional[StateStore] = None, greedy: bool = False) -> Union[ReductionCertificate, Exhausted]:
    """
    Look for a C-move sequence that lowers the complexity (w, -f).

    Args:
        chart: valid starting chart
        max_states: stored states allowed per search round
        max_depth: BFS depth per search round
        kinds: move kinds to use; all but hoop insertion by default
        workers: threads per layer
        store: canonical-form store, in-memory by default
        greedy: keep improving from the best chart of each round instead of
            stopping at the first certificate

    Returns:
        a certificate, or Exhausted
    """
    max_states = SearchConfig.MAX_STATES if max_states is None else max_states
    max_depth = SearchConfig.MAX_DEPTH if max_depth is None else max_depth
    if max_states <= 0 or max_depth <= 0:
        raise BudgetError(f"search budget must be positive (states {max_states}, depth {max_depth})")
    kinds = DEFAULT_KINDS if kinds is None else move_types(kinds)
    workers = max(1, workers or SearchConfig.WORKERS)
    store = store or StateStore()

    current = chart
    path: List[MoveInstance] = []
    rounds = 0
    total_states = 0
    while True:
        rounds += 1
        improved, stats = _search_round(current, kinds, max_states, max_depth, workers, store, greedy)
        total_states += stats.states
        if improved is None:
            break
        path.extend(improved.path)
        current = improved.chart
        logger.info(f"Round {rounds}: complexity {measures(current).complexity} after {len(path)} moves")
        if not greedy:
            break

    if not path:
        logger.info(f"No improvement found ({stats.reason}, {total_states} states)")
        return Exhausted(stats.reason, total_states, stats.depth, stats.frontier, measures(chart))
    return ReductionCertificate(initial=chart, moves=path, final=current, before=measures(chart),
                                after=measures(current), states=total_states, rounds=rounds)
