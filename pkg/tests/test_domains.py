from collections import Counter
from itertools import combinations

import pytest

from chart import VertexKind
from domains import (Scenario, angled_disks, boundary_arc_pair, complement, d_alpha_arcs, detect_lenses,
                     detect_m4_disks, io_balance, io_scenarios, make_domain, resolve_region, run_scenario, sphere)
from errors import ChartFormatError, ChartkitError, DomainPreconditionError, ScenarioError
from structure import label_subgraph
from tests.conftest import FIXTURE_NAMES


def test_domain_and_complement_partition_the_regions(load):
    chart = load('theta_pair').chart
    domain = make_domain(chart, {0, 1})
    other = complement(chart, domain)
    assert domain.regions | other.regions == set(range(len(chart.regions)))
    assert not domain.regions & other.regions
    assert set(domain.boundary_vertices) == set(other.boundary_vertices)
    with pytest.raises(ChartkitError):
        make_domain(chart, {len(chart.regions)})


def test_theta_pair_angled_disks(load):
    disks = angled_disks(load('theta_pair').chart, 1)
    assert len(disks) == 6
    assert all(d.k == 2 for d in disks)
    # the side away from the third edge has no feeler
    assert sum(d.special for d in disks) == 3
    assert all(len(d.feelers) == 1 for d in disks if not d.special)


def test_boundary_arc_pair(load):
    sketch = load('theta_pair')
    disk = angled_disks(sketch.chart, 1)[0]
    w1, w2 = disk.whites
    pair = boundary_arc_pair(sketch.chart, disk, w1, w2)
    assert len(pair.alpha) + len(pair.beta) == len(disk.curve)
    with pytest.raises(ChartkitError):
        boundary_arc_pair(sketch.chart, disk, w1, w1)


def test_no_arcs_without_an_arc(load):
    chart = load('theta_pair').chart
    disk = angled_disks(chart, 1)[0]
    assert d_alpha_arcs(chart, disk.domain, (), 1) == []


def test_theta_pair_lenses(load):
    lenses = detect_lenses(load('theta_pair').chart)
    assert Counter(lens.condition for lens in lenses) == {'ii': 4, 'i': 2}
    assert all(lens.m == 1 for lens in lenses)


def test_no_lens_without_white_vertices(load):
    assert detect_lenses(load('hoops').chart) == []


def test_m4_square(load):
    sketch = load('m4_square')
    disks = detect_m4_disks(sketch.chart, 2)
    assert len(disks) == 1
    disk = disks[0]
    names = sketch.names
    assert set(disk.whites) == {names.vertex(w) for w in ('w1', 'w2', 'w3', 'w4')}
    assert not disk.domain.contains_infinity
    assert detect_m4_disks(sketch.chart, 1) == []


def test_io_balance_on_the_sphere(corpus):
    for chart in corpus:
        for k in range(1, chart.n):
            balance = io_balance(chart, sphere(chart), k, range(len(chart.vertices)))
            assert balance.total == 0
            assert balance.delta_bound == 0


def test_io_balance_on_every_face(load):
    chart = load('bridge_dumbbell').chart
    # labels 1 to 3 all lie within one of 2
    for region in range(len(chart.regions)):
        assert io_balance(chart, make_domain(chart, {region}), 2).total == 0


def test_boundary_label_too_far_from_k(load):
    chart = load('m4_square').chart
    d = next(d for d in range(chart.dart_count) if chart.label(d) == 3)
    with pytest.raises(DomainPreconditionError) as info:
        io_balance(chart, make_domain(chart, {chart.region_of(d)}), 1)
    assert info.value.label == 3


def test_committed_scenarios_pass():
    results = io_scenarios(workers=2)
    assert [r.id for r in results] == sorted(r.id for r in results)
    assert all(r.passed for r in results), [r.to_dict() for r in results if not r.passed]
    computed = {r.id: r.computed for r in results}
    assert computed['dumbbell-complement-capacity'] == 3
    assert computed['dumbbell-complement-known-absorbers'] == 2
    assert computed['dumbbell-triangle-interior'] == 1
    assert computed['theta-sphere'] == 0
    assert computed['bigon-in-triangle-collar'] == 2
    assert computed['two-bigon-dumbbell-complement'] == 1
    assert computed['feeler-dumbbell-complement'] == 3


def test_unresolvable_scenario_is_skipped():
    scenario = Scenario(id='bogus', name='bogus', base='fixtures/theta_pair.json', label=1,
                        region={'select': 'nowhere'}, fixed={})
    result = run_scenario(scenario)
    assert result.status == 'skipped'
    assert not result.passed


def _square_arc(names, start):
    """Boundary darts of the square walked w1 -> w2 -> w3 -> w4 from the given corner"""
    darts = [names.dart('e1', 'tail'), names.dart('e2', 'tail'), names.dart('e3', 'head'), names.dart('e4', 'head')]
    i = ['w1', 'w2', 'w3', 'w4'].index(start)
    return darts[i:] + darts[:i]


def test_square_diagonal_is_an_arc_of_its_corners(load):
    sketch = load('m4_square')
    chart, names = sketch.chart, sketch.names
    domain = detect_m4_disks(chart, 2)[0].domain
    arcs = d_alpha_arcs(chart, domain, _square_arc(names, 'w2'), 1)
    assert len(arcs) == 1
    path = arcs[0]
    assert {chart.edge_of[d] for d in path} == {chart.edge_of[names.dart(e)] for e in ('e5a', 'e5b')}
    ends = {chart.vertex_of[path[0]], chart.vertex_of[chart.alpha(path[-1])]}
    assert ends == {names.vertex('w1'), names.vertex('w3')}
    assert all(domain.is_interior_edge(chart, d) for d in path)
    # the label-3 diagonal starts at w2, which is an end of the arc, not an inner point
    assert d_alpha_arcs(chart, domain, _square_arc(names, 'w2'), 3) == []


def test_other_diagonal_needs_the_other_arc(load):
    sketch = load('m4_square')
    chart, names = sketch.chart, sketch.names
    domain = detect_m4_disks(chart, 2)[0].domain
    arcs = d_alpha_arcs(chart, domain, _square_arc(names, 'w1'), 3)
    assert [{chart.edge_of[d] for d in path} for path in arcs] == [
        {chart.edge_of[names.dart(e)] for e in ('e6a', 'e6b')}]
    assert d_alpha_arcs(chart, domain, _square_arc(names, 'w1'), 1) == []
    outside = complement(chart, domain)
    assert d_alpha_arcs(chart, outside, _square_arc(names, 'w1'), 3) == []


def test_io_balance_vanishes_on_every_face_of_the_corpus(corpus):
    for chart in corpus:
        for region in range(len(chart.regions)):
            domain = make_domain(chart, {region})
            for k in range(1, chart.n):
                try:
                    balance = io_balance(chart, domain, k)
                except DomainPreconditionError:
                    continue
                assert balance.total == 0
                assert sum(balance.delta.values()) == 0


def test_named_regions_of_the_triangle_with_a_bigon(load):
    sketch = load('triangle_with_bigon')
    names = sketch.names
    assert names.region('F') == names.region('D') - names.region('E')
    assert names.region('E') < names.region('D')
    with pytest.raises(ChartFormatError):
        names.region('G')


def test_named_region_selector(load):
    sketch = load('feeler_dumbbell')
    outside = resolve_region(sketch, {'select': 'named', 'name': 'outside'})
    disks = resolve_region(sketch, {'select': 'named', 'name': 'outside', 'complement': True})
    assert disks.regions == sketch.names.region('D1') | sketch.names.region('D2')
    assert not outside.regions & disks.regions
    with pytest.raises(ScenarioError):
        resolve_region(sketch, {'select': 'named', 'name': 'nowhere'})


def test_feeler_dumbbell_outside_counts(load):
    sketch = load('feeler_dumbbell')
    domain = resolve_region(sketch, {'select': 'named', 'name': 'outside'})
    balance = io_balance(sketch.chart, domain, 2, domain.boundary_vertices)
    assert (balance.inward, balance.outward) == (1, 7)
    assert (balance.open_inward, balance.open_outward) == (1, 5)
    assert balance.capacity_bound == 3


def _white_strands(chart, m):
    """Label-m strands between two different white vertices, walked dart by dart"""
    found = {}
    for v in chart.vertices_of_kind(VertexKind.WHITE):
        for d in chart.vertices[v]:
            if chart.label(d) != m:
                continue
            path, x = [d], d
            while True:
                y = chart.alpha(x)
                u = chart.vertex_of[y]
                if chart.kinds[u] is VertexKind.CROSSING:
                    x = chart.sigma(y, 2)
                elif chart.kinds[u] is VertexKind.JOINT:
                    x = chart.sigma(y, 1)
                else:
                    break
                path.append(x)
            if chart.kinds[u] is VertexKind.WHITE and u != v:
                found.setdefault(frozenset(chart.edge_of[p] for p in path), {v: d, u: y})
    return found


def _sides(chart, edges, d):
    blocked = set(edges)
    return {frozenset(chart.flood_regions({chart.region_of(x)}, blocked)) for x in (d, chart.alpha(d))}


def _middle(chart, d):
    inward = chart.is_inward(d)
    return chart.is_inward(chart.sigma(d, 1)) == inward == chart.is_inward(chart.sigma(d, -1))


def _empty_corner(chart, a, b, side):
    return ((chart.sigma(a) == b and chart.region_of(b) in side)
            or (chart.sigma(b) == a and chart.region_of(a) in side))


def _naive_lenses(chart):
    found = []
    for m in range(1, chart.n - 1):
        uppers = _white_strands(chart, m + 1)
        for lower, lower_ends in _white_strands(chart, m).items():
            for upper, upper_ends in uppers.items():
                if set(upper_ends) != set(lower_ends):
                    continue
                whites = list(lower_ends)
                for side in _sides(chart, lower | upper, lower_ends[whites[0]]):
                    if not all(_empty_corner(chart, lower_ends[w], upper_ends[w], side) for w in whites):
                        continue
                    lower_middle = [_middle(chart, lower_ends[w]) for w in whites]
                    upper_middle = [_middle(chart, upper_ends[w]) for w in whites]
                    if not any(lower_middle + upper_middle):
                        found.append((m, lower, upper, side, 'i'))
                    elif all(lower_middle) or all(upper_middle):
                        found.append((m, lower, upper, side, 'ii'))
    return Counter(found)


def _lens_keys(chart):
    return Counter((lens.m, frozenset(chart.edge_of[d] for d in lens.lower.darts),
                    frozenset(chart.edge_of[d] for d in lens.upper.darts),
                    frozenset(lens.domain.regions), lens.condition) for lens in detect_lenses(chart))


def test_lenses_agree_with_brute_force(load, corpus):
    charts = [load(name).chart for name in FIXTURE_NAMES] + list(corpus)
    for chart in charts:
        assert _lens_keys(chart) == _naive_lenses(chart)
    assert sum(_naive_lenses(load('theta_pair').chart).values()) == 6


def _naive_m4_disks(chart, k):
    found = set()
    if k < 2 or k > chart.n - 2:
        return found
    lower_chains = label_subgraph(chart, k - 1).chains
    upper_chains = label_subgraph(chart, k + 1).chains
    for quad in combinations(_white_strands(chart, k).items(), 4):
        degree = Counter(w for _, ends in quad for w in ends)
        if len(degree) != 4 or set(degree.values()) != {2}:
            continue
        first = quad[0][1]
        a = next(iter(first))
        order = [a]
        while len(order) < 4:
            step = next((w for _, ends in quad for w in ends
                         if order[-1] in ends and w != order[-1] and w not in order), None)
            if step is None:
                break
            order.append(step)
        if len(order) != 4:
            continue
        blocked = frozenset().union(*(edges for edges, _ in quad))
        corners = set(order)
        for side in _sides(chart, blocked, first[a]):
            if any(chart.region_of(chart.vertices[v][0]) in side
                   for v in chart.vertices_of_kind(VertexKind.WHITE) if v not in corners):
                continue

            def meeting(chains):
                return [c for c in chains
                        if any(chart.region_of(d) in side or chart.region_of(chart.alpha(d)) in side for d in c.darts)]

            lower, upper = meeting(lower_chains), meeting(upper_chains)
            if len(lower) != 1 or len(upper) != 1:
                continue
            if lower[0].kind != 'internal' or upper[0].kind != 'internal':
                continue
            lower_ends = {chart.vertex_of[lower[0].start], chart.vertex_of[lower[0].end]}
            upper_ends = {chart.vertex_of[upper[0].start], chart.vertex_of[upper[0].end]}
            diagonals = ({order[0], order[2]}, {order[1], order[3]})
            if (lower_ends, upper_ends) in (diagonals, diagonals[::-1]):
                found.add((frozenset(order), side))
    return found


def test_m4_disks_agree_with_brute_force(load, corpus):
    charts = [load(name).chart for name in FIXTURE_NAMES] + list(corpus)
    for chart in charts:
        for k in range(1, chart.n):
            detected = {(frozenset(disk.whites), frozenset(disk.domain.regions)) for disk in detect_m4_disks(chart, k)}
            assert len(detected) == len(detect_m4_disks(chart, k))
            assert detected == _naive_m4_disks(chart, k)
    assert len(_naive_m4_disks(load('m4_square').chart, 2)) == 1
