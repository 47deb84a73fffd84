"""
Domains, angled disks, lenses and IO balance
Области, угловые диски, линзы и баланс дуг

A domain is a union of regions of the chart together with its closure: the
edges with a side inside, and the vertices on them. Angled disks are cut out
by simple closed curves of Gamma_m; lenses and M4-disks are special bigons
and quadrilaterals. IO balance counts the label-k edge ends a closed domain
holds at each vertex; the signed sum over the domain is always zero, which
turns known boundary data into lower bounds on interior vertices.
"""

import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from chart import Chart, VertexKind
from config import CatalogConfig, DATA_DIR, SearchConfig
from errors import ChartFormatError, ChartkitError, DomainPreconditionError, ScenarioError
from sketch import Sketch, load_sketch
from structure import Chain, LabelSubgraph, is_middle, label_subgraph

logger = logging.getLogger(__name__)


# ----------------------------------------------------------------------
# Domains
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Domain:
    """Closed union of regions"""
    regions: FrozenSet[int]
    boundary: Tuple[int, ...]               # boundary darts whose face lies inside
    boundary_labels: FrozenSet[int]
    boundary_vertices: FrozenSet[int]
    interior_vertices: FrozenSet[int]
    contains_infinity: bool
    boundary_edges: FrozenSet[int] = frozenset()

    @property
    def vertices(self) -> FrozenSet[int]:
        return self.boundary_vertices | self.interior_vertices

    def holds_edge(self, chart: Chart, d: int) -> bool:
        """Whether the edge of dart d lies in the closed domain"""
        return chart.region_of(d) in self.regions or chart.region_of(chart.alpha(d)) in self.regions

    def is_interior_edge(self, chart: Chart, d: int) -> bool:
        return chart.region_of(d) in self.regions and chart.region_of(chart.alpha(d)) in self.regions

    def to_dict(self) -> Dict[str, Any]:
        return {
            'regions': sorted(self.regions),
            'boundary': list(self.boundary),
            'boundary_labels': sorted(self.boundary_labels),
            'boundary_vertices': sorted(self.boundary_vertices),
            'interior_vertices': sorted(self.interior_vertices),
            'contains_infinity': self.contains_infinity,
        }


def make_domain(chart: Chart, regions: Iterable[int]) -> Domain:
    """Closed domain spanned by a set of region indices"""
    chosen = frozenset(regions)
    unknown = [r for r in chosen if not 0 <= r < len(chart.regions)]
    if unknown:
        raise ChartkitError(f"unknown regions {sorted(unknown)}")
    boundary = []
    touching: Set[int] = set()
    outside: Set[int] = set()
    for d in range(chart.dart_count):
        v = chart.vertex_of[d]
        inside = chart.region_of(d) in chosen
        other = chart.region_of(chart.alpha(d)) in chosen
        if inside and not other:
            boundary.append(d)
        if inside or other:
            touching.add(v)
        if not inside:
            outside.add(v)
    boundary_vertices = set()
    for d in boundary:
        boundary_vertices.add(chart.vertex_of[d])
        boundary_vertices.add(chart.vertex_of[chart.alpha(d)])
    interior = {v for v in touching if v not in outside and v not in boundary_vertices}
    return Domain(
        regions=chosen,
        boundary=tuple(boundary),
        boundary_labels=frozenset(chart.label(d) for d in boundary),
        boundary_vertices=frozenset(boundary_vertices),
        interior_vertices=frozenset(interior),
        contains_infinity=chart.infinity_face in chosen,
        boundary_edges=frozenset(chart.edge_of[d] for d in boundary),
    )


def sphere(chart: Chart) -> Domain:
    return make_domain(chart, range(len(chart.regions)))


def complement(chart: Chart, domain: Domain) -> Domain:
    """Closure of the regions outside a domain"""
    return make_domain(chart, set(range(len(chart.regions))) - domain.regions)


def white_count(chart: Chart, vertices: Iterable[int]) -> int:
    return sum(1 for v in vertices if chart.kinds[v] is VertexKind.WHITE)


# ----------------------------------------------------------------------
# Angled disks
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class AngledDisk:
    """Disk bounded by a simple closed curve of Gamma_m"""
    domain: Domain
    m: int
    k: int                                  # white vertices on the boundary
    whites: Tuple[int, ...]                 # in order along the curve
    curve: Tuple[int, ...]                  # forward darts of the boundary curve
    chains: Tuple[Chain, ...]
    feelers: Tuple[Chain, ...]
    special: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            'm': self.m,
            'k': self.k,
            'whites': list(self.whites),
            'curve': list(self.curve),
            'feelers': [{'kind': c.kind, 'darts': list(c.darts)} for c in self.feelers],
            'special': self.special,
            'domain': self.domain.to_dict(),
        }


def _oriented(chart: Chart, chain: Chain, from_vertex: int) -> List[int]:
    """Forward darts of a chain traversed away from one of its end vertices"""
    if chain.start is None or chart.vertex_of[chain.start] == from_vertex:
        return list(chain.darts)
    return [chart.alpha(d) for d in reversed(chain.darts)]


def _other_end(chart: Chart, chain: Chain, vertex: int) -> int:
    a, b = chart.vertex_of[chain.start], chart.vertex_of[chain.end]
    return b if a == vertex else a


def simple_cycles(sub: LabelSubgraph,
                  max_boundary_len: Optional[int] = None) -> List[Tuple[Tuple[int, ...], Tuple[Chain, ...], List[int]]]:
    """
    Simple closed curves of a label subgraph.

    Args:
        sub: the label subgraph
        max_boundary_len: largest number of chains on a curve, None for all

    Returns:
        (whites along the curve, chains, forward darts) per curve
    """
    chart = sub.chart
    found = []
    for chain in sub.chains:
        if chain.kind in ('hoop', 'ring'):
            found.append(((), (chain,), list(chain.darts)))
        elif chain.kind == 'loop':
            found.append(((chart.vertex_of[chain.start],), (chain,), list(chain.darts)))

    adjacency: Dict[int, List[Chain]] = {}
    for chain in sub.by_kind('internal'):
        adjacency.setdefault(chart.vertex_of[chain.start], []).append(chain)
        adjacency.setdefault(chart.vertex_of[chain.end], []).append(chain)

    seen: Set[FrozenSet[Tuple[int, ...]]] = set()

    def extend(start: int, path: List[int], chains: List[Chain]):
        u = path[-1]
        for chain in adjacency.get(u, ()):
            if chain in chains:
                continue
            v = _other_end(chart, chain, u)
            if v == start:
                key = frozenset(c.key for c in chains + [chain])
                if len(chains) >= 1 and key not in seen:
                    seen.add(key)
                    curve: List[int] = []
                    ring = chains + [chain]
                    for i, c in enumerate(ring):
                        curve.extend(_oriented(chart, c, path[i]))
                    found.append((tuple(path), tuple(ring), curve))
            elif v > start and v not in path:
                if max_boundary_len is None or len(chains) + 1 < max_boundary_len:
                    extend(start, path + [v], chains + [chain])

    for start in sorted(adjacency):
        extend(start, [start], [])
    if max_boundary_len is not None:
        found = [item for item in found if len(item[1]) <= max_boundary_len]
    return found


def _feelers(chart: Chart, sub: LabelSubgraph, whites: Sequence[int], curve_edges: Set[int],
             regions: FrozenSet[int]) -> Tuple[Chain, ...]:
    feelers: Dict[Tuple[int, ...], Chain] = {}
    for w in whites:
        for d in chart.vertices[w]:
            if chart.label(d) != sub.m or chart.edge_of[d] in curve_edges:
                continue
            if chart.region_of(d) in regions:
                chain = sub.chain_at(d)
                feelers.setdefault(chain.key, chain)
    return tuple(feelers[key] for key in sorted(feelers))


def angled_disks(chart: Chart, m: int, max_boundary_len: Optional[int] = None) -> List[AngledDisk]:
    """Both sides of every simple closed curve of Gamma_m as angled disks"""
    sub = label_subgraph(chart, m)
    disks = []
    for whites, chains, curve in simple_cycles(sub, max_boundary_len):
        curve_edges = {chart.edge_of[d] for d in curve}
        left, right = chart.curve_sides(curve)
        for side in (right, left):
            domain = make_domain(chart, side)
            feelers = _feelers(chart, sub, whites, curve_edges, domain.regions)
            disks.append(AngledDisk(
                domain=domain,
                m=m,
                k=len(whites),
                whites=whites,
                curve=tuple(curve),
                chains=chains,
                feelers=feelers,
                special=all(f.kind == 'terminal' for f in feelers),
            ))
    logger.debug(f"Found {len(disks)} angled disks of label {m}")
    return disks


@dataclass(frozen=True)
class BoundaryArcPair:
    """Two arcs alpha, beta with the disk boundary their union and their common ends"""
    disk: AngledDisk
    ends: Tuple[int, int]
    alpha: Tuple[int, ...]
    beta: Tuple[int, ...]


def boundary_arc_pair(chart: Chart, disk: AngledDisk, start: int, end: int) -> BoundaryArcPair:
    """Cut the boundary curve of a disk at two of its vertices"""
    stops = [chart.vertex_of[d] for d in disk.curve]
    if start == end:
        raise ChartkitError("an arc pair needs two distinct boundary vertices")
    try:
        i, j = stops.index(start), stops.index(end)
    except ValueError:
        raise ChartkitError(f"vertices {start} and {end} must both lie on the disk boundary")
    curve = list(disk.curve)
    rotated = curve[i:] + curve[:i]
    cut = (j - i) % len(curve)
    return BoundaryArcPair(disk=disk, ends=(start, end), alpha=tuple(rotated[:cut]), beta=tuple(rotated[cut:]))


def d_alpha_arcs(chart: Chart, domain: Domain, alpha: Sequence[int], k: int) -> List[Tuple[int, ...]]:
    """
    Maximal pieces of label-k internal edges with both ends in the interior
    of alpha and every edge inside the domain. An empty list means the chart
    is free of such arcs.
    """
    if not alpha:
        return []
    inner_points = {chart.vertex_of[d] for d in alpha[1:]}
    boundary_edges = domain.boundary_edges
    sub = label_subgraph(chart, k)

    def inside(d: int) -> bool:
        return chart.edge_of[d] not in boundary_edges and domain.is_interior_edge(chart, d)

    def walk(d: int) -> Optional[Tuple[int, ...]]:
        path = [d]
        x = d
        for _ in range(chart.dart_count):
            y = chart.alpha(x)
            u = chart.vertex_of[y]
            if u in domain.boundary_vertices:
                return tuple(path) if u in inner_points else None
            if chart.degree(u) == 4:
                x = chart.sigma(y, 2)
            elif chart.degree(u) == 2:
                x = chart.sigma(y, 1)
            else:
                return None
            if not inside(x):
                return None
            path.append(x)
        return None

    found: Dict[FrozenSet[int], Tuple[int, ...]] = {}
    for v in sorted(inner_points):
        for d in chart.vertices[v]:
            if chart.label(d) != k or not inside(d):
                continue
            if sub.chain_at(d).kind not in ('internal', 'loop'):
                continue
            path = walk(d)
            if path is not None:
                found.setdefault(frozenset(chart.edge_of[x] for x in path), path)
    return sorted(found.values())


# ----------------------------------------------------------------------
# Lenses and M4-disks
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Lens:
    domain: Domain
    m: int
    lower: Chain                    # label m
    upper: Chain                    # label m + 1
    whites: Tuple[int, int]
    condition: str                  # 'i' or 'ii'

    def to_dict(self) -> Dict[str, Any]:
        return {
            'm': self.m,
            'whites': list(self.whites),
            'lower': list(self.lower.darts),
            'upper': list(self.upper.darts),
            'condition': self.condition,
            'domain': self.domain.to_dict(),
        }


def _end_at(chart: Chart, chain: Chain, vertex: int) -> int:
    return chain.start if chart.vertex_of[chain.start] == vertex else chain.end


def _lens_condition(chart: Chart, lower: Chain, upper: Chain, whites: Tuple[int, int]) -> Optional[str]:
    lower_middle = [is_middle(chart, _end_at(chart, lower, w)) for w in whites]
    upper_middle = [is_middle(chart, _end_at(chart, upper, w)) for w in whites]
    if not any(lower_middle) and not any(upper_middle):
        return 'i'
    if all(lower_middle) or all(upper_middle):
        return 'ii'
    return None


def detect_lenses(chart: Chart) -> List[Lens]:
    """Bigons of a label-m and a label-(m+1) internal edge meeting the lens conditions"""
    lenses = []
    for m in range(1, chart.n - 1):
        lower_sub = label_subgraph(chart, m)
        upper_sub = label_subgraph(chart, m + 1)
        for lower in lower_sub.by_kind('internal'):
            w1, w2 = chart.vertex_of[lower.start], chart.vertex_of[lower.end]
            for upper in upper_sub.by_kind('internal'):
                if {chart.vertex_of[upper.start], chart.vertex_of[upper.end]} != {w1, w2}:
                    continue
                curve = _oriented(chart, lower, w1) + _oriented(chart, upper, w2)
                own = {lower.start, lower.end, upper.start, upper.end}
                for side in chart.curve_sides(curve):
                    domain = make_domain(chart, side)
                    if any(d not in own and chart.region_of(d) in domain.regions
                           for w in (w1, w2) for d in chart.vertices[w]):
                        continue
                    condition = _lens_condition(chart, lower, upper, (w1, w2))
                    if condition:
                        lenses.append(Lens(domain, m, lower, upper, (w1, w2), condition))
    if lenses:
        logger.info(f"Found {len(lenses)} lenses")
    return lenses


@dataclass(frozen=True)
class M4Disk:
    """Quadrilateral of label-k internal edges with one diagonal of label k-1 and one of k+1"""
    domain: Domain
    k: int
    whites: Tuple[int, int, int, int]       # w1..w4 with the k-1 diagonal joining w1 and w3
    sides: Tuple[Chain, ...]                # e1..e4
    lower: Chain                            # e5, label k - 1
    upper: Chain                            # e6, label k + 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            'k': self.k,
            'whites': list(self.whites),
            'sides': [list(c.darts) for c in self.sides],
            'lower': list(self.lower.darts),
            'upper': list(self.upper.darts),
            'domain': self.domain.to_dict(),
        }


def _chains_meeting(chart: Chart, sub: LabelSubgraph, domain: Domain) -> List[Chain]:
    return [c for c in sub.chains if any(domain.holds_edge(chart, d) for d in c.darts)]


def _joins(chart: Chart, chain: Chain, a: int, b: int) -> bool:
    return chain.kind == 'internal' and {chart.vertex_of[chain.start], chart.vertex_of[chain.end]} == {a, b}


def detect_m4_disks(chart: Chart, k: int) -> List[M4Disk]:
    """Disks bounded by four label-k internal edges with single k-1 and k+1 diagonals and no white inside"""
    if k - 1 < 1 or k + 1 > chart.n - 1:
        return []
    sub = label_subgraph(chart, k)
    lower_sub, upper_sub = label_subgraph(chart, k - 1), label_subgraph(chart, k + 1)
    found = []
    for whites, chains, curve in simple_cycles(sub, 4):
        if len(whites) != 4 or len(chains) != 4:
            continue
        for side in chart.curve_sides(curve):
            domain = make_domain(chart, side)
            if white_count(chart, domain.interior_vertices):
                continue
            lower = _chains_meeting(chart, lower_sub, domain)
            upper = _chains_meeting(chart, upper_sub, domain)
            if len(lower) != 1 or len(upper) != 1:
                continue
            w = whites
            for order in ((w[0], w[1], w[2], w[3]), (w[1], w[2], w[3], w[0])):
                if _joins(chart, lower[0], order[0], order[2]) and _joins(chart, upper[0], order[1], order[3]):
                    found.append(M4Disk(domain, k, order, chains, lower[0], upper[0]))
                    break
    return found


# ----------------------------------------------------------------------
# IO balance
# ----------------------------------------------------------------------

@dataclass
class IOBalance:
    """Label-k edge ends held by a closed domain"""
    k: int
    delta: Dict[int, int]
    total: int
    fixed: Tuple[int, ...] = ()
    inward: int = 0                 # inward ends at fixed vertices
    outward: int = 0
    open_inward: int = 0            # fixed ends whose chain runs to an unfixed white vertex
    open_outward: int = 0
    delta_bound: int = 0
    capacity_bound: int = 0

    @property
    def lower_bound(self) -> int:
        return self.delta_bound

    def bound(self, mode: str) -> int:
        if mode == 'delta':
            return self.delta_bound
        if mode == 'capacity':
            return self.capacity_bound
        raise ChartkitError(f"unknown bound mode {mode!r}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'k': self.k,
            'delta': {str(v): d for v, d in sorted(self.delta.items())},
            'total': self.total,
            'fixed': list(self.fixed),
            'inward': self.inward,
            'outward': self.outward,
            'open_inward': self.open_inward,
            'open_outward': self.open_outward,
            'delta_bound': self.delta_bound,
            'capacity_bound': self.capacity_bound,
        }


def check_io_boundary(chart: Chart, domain: Domain, k: int):
    for d in domain.boundary:
        label = chart.label(d)
        if abs(label - k) > 1:
            raise DomainPreconditionError(
                f"boundary edge of dart {d} has label {label}, outside {k - 1}..{k + 1}", label)


def _ends_in(chart: Chart, domain: Domain, k: int) -> List[int]:
    ends = []
    for d in range(chart.dart_count):
        if chart.label(d) != k or not domain.holds_edge(chart, d):
            continue
        if chart.is_inward(d) is None:
            raise ChartkitError(f"edge of dart {d} carries no orientation")
        ends.append(d)
    return ends


def io_balance(chart: Chart, domain: Domain, k: int, fixed: Optional[Iterable[int]] = None) -> IOBalance:
    """
    Signed label-k end count per vertex of a closed domain.

    Each label-k edge with a side in the domain contributes +1 at its head
    and -1 at its tail, so the total over the domain is zero. Knowing delta
    at the fixed vertices only, every unfixed vertex touching label k can
    absorb one unit of imbalance; a white vertex absorbs at most two ends of
    one orientation and three in all, which gives the capacity bound.

    Args:
        chart: the chart
        domain: closed domain with boundary labels in {k-1, k, k+1}
        k: the label
        fixed: vertices whose delta is taken as known

    Returns:
        the balance report
    """
    check_io_boundary(chart, domain, k)
    fixed_set = set(fixed or ())
    balance = IOBalance(k=k, delta={}, total=0, fixed=tuple(sorted(fixed_set)))
    for d in _ends_in(chart, domain, k):
        v = chart.vertex_of[d]
        step = 1 if chart.is_inward(d) else -1
        balance.delta[v] = balance.delta.get(v, 0) + step
        balance.total += step
        if v not in fixed_set:
            continue
        if step > 0:
            balance.inward += 1
        else:
            balance.outward += 1
        far = chart.vertex_of[chart.strand_end(d)]
        if far not in fixed_set and chart.kinds[far] is VertexKind.WHITE:
            if step > 0:
                balance.open_inward += 1
            else:
                balance.open_outward += 1
    if balance.total != 0:
        logger.error(f"Label-{k} ends do not balance over the domain: total {balance.total}")
    balance.delta_bound = abs(balance.inward - balance.outward)
    oi, oo = balance.open_inward, balance.open_outward
    balance.capacity_bound = max(math.ceil(oi / 2), math.ceil(oo / 2), math.ceil((oi + oo) / 3))
    return balance


def unfixed_touching(chart: Chart, domain: Domain, k: int, fixed: Iterable[int]) -> int:
    """Unfixed vertices of the domain that touch label k with a nonzero delta"""
    fixed_set = set(fixed)
    touching = set()
    for d in _ends_in(chart, domain, k):
        v = chart.vertex_of[d]
        if v not in fixed_set and chart.kinds[v] in (VertexKind.WHITE, VertexKind.BLACK):
            touching.add(v)
    return len(touching)


# ----------------------------------------------------------------------
# Scenarios
# ----------------------------------------------------------------------

@dataclass
class Scenario:
    id: str
    name: str
    base: str
    label: int
    region: Dict[str, Any]
    fixed: Dict[str, Any]
    bound: str = 'delta'
    claimed: int = 0
    note: str = ''


@dataclass
class ScenarioResult:
    id: str
    name: str
    label: int
    claimed: int
    computed: Optional[int]
    status: str                     # pass, fail, skipped or rejected
    message: str = ''
    balance: Optional[IOBalance] = None

    @property
    def passed(self) -> bool:
        return self.status == 'pass'

    def to_dict(self) -> Dict[str, Any]:
        result = {
            'id': self.id,
            'name': self.name,
            'label': self.label,
            'claimed': self.claimed,
            'computed': self.computed,
            'status': self.status,
            'message': self.message,
        }
        if self.balance is not None:
            result['balance'] = self.balance.to_dict()
        return result


def load_scenarios(path: Optional[str] = None) -> List[Scenario]:
    path = path or CatalogConfig.SCENARIO_FILE
    try:
        with open(path, 'r', encoding='utf-8') as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ChartFormatError(f"cannot read scenario file {path}: {e}") from e
    scenarios = []
    for entry in doc.get('scenarios', []):
        try:
            scenarios.append(Scenario(
                id=entry['id'],
                name=entry.get('name', entry['id']),
                base=entry['base'],
                label=int(entry['label']),
                region=dict(entry['region']),
                fixed=dict(entry.get('fixed', {})),
                bound=entry.get('bound', 'delta'),
                claimed=int(entry.get('claimed', 0)),
                note=entry.get('note', ''),
            ))
        except (KeyError, TypeError, ValueError) as e:
            raise ChartFormatError(f"malformed scenario {entry.get('id', '?')!r}: {e}") from e
    logger.info(f"Loaded {len(scenarios)} scenarios from {path}")
    return scenarios


def _pick_disks(sketch: Sketch, selector: Dict[str, Any]) -> List[AngledDisk]:
    chart, names = sketch.chart, sketch.names
    m = int(selector['label'])
    pool = [d for d in angled_disks(chart, m) if not d.domain.contains_infinity]
    chosen: List[AngledDisk] = []
    for wanted in selector.get('disks', []):
        through = {names.vertex(v) for v in wanted.get('whites', [])}
        matches = [d for d in pool
                   if d.k == wanted['k']
                   and ('special' not in wanted or d.special == wanted['special'])
                   and through <= set(d.whites)
                   and d not in chosen]
        if len(matches) != 1:
            raise ScenarioError(f"{len(matches)} angled disks of label {m} match {wanted}")
        chosen.append(matches[0])
    return chosen


def resolve_region(sketch: Sketch, selector: Dict[str, Any]) -> Domain:
    """Domain named by a region selector"""
    chart, names = sketch.chart, sketch.names
    kind = selector.get('select')
    try:
        if kind == 'sphere':
            return sphere(chart)
        if kind == 'flood':
            seed = selector['seed']
            start = chart.region_of(names.side_dart(seed['edge'], seed.get('side', 'right')))
            blocked = {chart.edge_of[names.dart(e)] for e in selector.get('boundary', [])}
            return make_domain(chart, chart.flood_regions({start}, blocked))
        if kind == 'named':
            domain = make_domain(chart, names.region(selector['name']))
            return complement(chart, domain) if selector.get('complement') else domain
        if kind == 'angled_disks':
            disks = _pick_disks(sketch, selector)
            regions: Set[int] = set()
            for disk in disks:
                regions |= disk.domain.regions
            domain = make_domain(chart, regions)
            return complement(chart, domain) if selector.get('complement') else domain
    except (ChartFormatError, KeyError) as e:
        raise ScenarioError(f"cannot resolve region selector: {e}") from e
    raise ScenarioError(f"unknown region selector {kind!r}")


def resolve_fixed(sketch: Sketch, domain: Domain, selector: Dict[str, Any]) -> Set[int]:
    names = sketch.names
    kind = selector.get('select', 'vertices')
    try:
        if kind == 'boundary':
            fixed = set(domain.boundary_vertices)
        elif kind == 'vertices':
            fixed = {names.vertex(v) for v in selector.get('vertices', [])}
        else:
            raise ScenarioError(f"unknown fixed-vertex selector {kind!r}")
        fixed |= {names.vertex(v) for v in selector.get('extra', [])}
    except ChartFormatError as e:
        raise ScenarioError(f"cannot resolve fixed vertices: {e}") from e
    return fixed


def _base_path(base: str) -> str:
    return base if os.path.isabs(base) else os.path.join(DATA_DIR, base)


def run_scenario(scenario: Scenario, sketch: Optional[Sketch] = None) -> ScenarioResult:
    """Compute one scenario's bound and compare it with the claim"""
    result = ScenarioResult(id=scenario.id, name=scenario.name, label=scenario.label,
                            claimed=scenario.claimed, computed=None, status='skipped')
    try:
        sketch = sketch or load_sketch(_base_path(scenario.base))
        domain = resolve_region(sketch, scenario.region)
        fixed = resolve_fixed(sketch, domain, scenario.fixed)
        balance = io_balance(sketch.chart, domain, scenario.label, fixed)
        computed = balance.bound(scenario.bound)
    except ScenarioError as e:
        logger.warning(f"Skipping scenario {scenario.id}: {e}")
        result.message = str(e)
        return result
    except DomainPreconditionError as e:
        logger.warning(f"Scenario {scenario.id} rejected: {e}")
        result.status = 'rejected'
        result.message = str(e)
        return result
    result.balance = balance
    result.computed = computed
    result.status = 'pass' if computed >= scenario.claimed else 'fail'
    if not result.passed:
        result.message = f"computed bound {computed} is below the claimed {scenario.claimed}"
    return result


def io_scenarios(path: Optional[str] = None, sketch: Optional[Sketch] = None,
                 workers: Optional[int] = None) -> List[ScenarioResult]:
    """
    Run every scenario of a scenario file.

    Args:
        path: scenario file, the configured default when None
        sketch: chart to use instead of each scenario's own base
        workers: thread count for the batch

    Returns:
        results sorted by scenario id
    """
    scenarios = load_scenarios(path)
    workers = workers or SearchConfig.WORKERS
    results: List[ScenarioResult] = []
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        futures = {executor.submit(run_scenario, s, sketch): s for s in scenarios}
        for future in as_completed(futures):
            results.append(future.result())
    results.sort(key=lambda r: r.id)
    passed = sum(1 for r in results if r.passed)
    logger.info(f"Scenarios: {passed}/{len(results)} passed")
    return results
