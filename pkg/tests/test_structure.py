from canonical import ro_variants, verify_isomorphism
from chart import VertexKind
from structure import (bw_expand, bw_normalize, check_catalog, classify_shape, detect_patterns, find_loops,
                       is_middle, label_subgraph, load_catalog, neighbor_names, orientation_at, prepare_shape,
                       skeleton)
from tests.conftest import FIXTURE_NAMES

LOOP_AT_WHITE = {
    'edges': {'l': {'label': 1, 'from': 'w', 'to': 'w'}},
    'vertices': {'w': ['in:1', 'in:2', 'l:head', 'out:2', 'l:tail', 'out:2']},
}


def test_free_edge_is_one_free_chain(load):
    sub = label_subgraph(load('free_edge').chart, 1)
    assert [c.kind for c in sub.chains] == ['free']
    assert sub.whites == []


def test_theta_pair_label_one_is_a_theta(load):
    chart = load('theta_pair').chart
    sub = label_subgraph(chart, 1)
    assert len(sub.by_kind('internal')) == 3
    assert len(sub.whites) == 2
    assert sub.blacks == []
    skel = skeleton(sub).chart
    assert len(skel.vertices) - len(skel.edges) + len(skel.regions) == 2
    assert len(skel.regions) == 3


def test_chains_cover_the_label(corpus):
    for chart in corpus:
        for m in range(1, chart.n):
            sub = label_subgraph(chart, m)
            covered = {chart.edge_of[d] for c in sub.chains for d in c.darts}
            wanted = {chart.edge_of[d] for d in range(chart.dart_count) if chart.label(d) == m}
            assert covered == wanted


def test_star_chains_and_middle_arcs(load):
    sketch = load('star')
    chart, names = sketch.chart, sketch.names
    assert len(label_subgraph(chart, 1).by_kind('terminal')) == 3
    w = names.vertex('w')
    inward = names.dart('w#1', 'head')
    assert orientation_at(chart, w, inward) == 'inward'
    assert orientation_at(chart, w, names.dart('w#3', 'tail')) == 'outward'
    assert is_middle(chart, inward)
    assert not is_middle(chart, names.dart('w#0', 'head'))


def test_loop_is_found(inline):
    sketch = inline(LOOP_AT_WHITE)
    sub = label_subgraph(sketch.chart, 1)
    loops = find_loops(sub)
    assert len(loops) == 1
    tail, head = sketch.names.edges['l']
    assert {sketch.chart.is_inward(tail), sketch.chart.is_inward(head)} == {True, False}


def test_neighbours_of_a_loop_end(inline):
    sketch = inline(LOOP_AT_WHITE)
    w = sketch.names.vertex('w')
    names = neighbor_names(sketch.chart, sketch.names.dart('w#3', 'tail'), w)
    # both neighbours of the stub between the loop ends lie on the loop
    assert names.same


def test_bw_normalize_marks_every_bw_vertex(load):
    sub = label_subgraph(load('bridge_dumbbell').chart, 1)
    form = bw_normalize(sub)
    assert len(form.stubs) == 3
    restored = bw_expand(form)
    assert len(restored.edges) == len(skeleton(sub).chart.edges)


def test_catalog_loads_without_clashes():
    catalog = load_catalog()
    assert len(catalog) == 14
    assert check_catalog(catalog) == []
    ids = {p.id for p in catalog}
    assert {'THETA', 'OVAL', 'SKEW_THETA', 'FIG10_G', 'FIG10_H', 'FIG27_A', 'FIG27_B'} <= ids
    for pattern in catalog:
        if pattern.id.startswith(('FIG10_', 'FIG27_')):
            assert pattern.white == 5


def test_theta_is_detected(load):
    sub = label_subgraph(load('theta_pair').chart, 1)
    assert [m.pattern for m in detect_patterns(sub, load_catalog())] == ['THETA']


def test_bridge_dumbbell_matches_plain_and_oriented_entries(load):
    sub = label_subgraph(load('bridge_dumbbell').chart, 1)
    found = {m.pattern for m in detect_patterns(sub, load_catalog())}
    assert found == {'FIG10_G', 'FIG27_A'}


def test_two_bigon_dumbbell_matches_its_catalog_entries(load):
    sketch = load('two_bigon_dumbbell')
    sub = label_subgraph(sketch.chart, 1)
    matches = detect_patterns(sub, load_catalog())
    assert {m.pattern for m in matches} == {'FIG10_H', 'FIG27_B'}
    oriented = next(m for m in matches if m.pattern == 'FIG27_B')
    # the oriented entry lands on the dumbbell's own label-1 edges
    dumbbell = {sketch.names.dart(name, end) for name in ('a', 'b', 'g1', 'g2', 'c', 'd', 't1', 't3', 't5')
                for end in ('tail', 'head')}
    assert set(oriented.mapping.values()) == dumbbell


def test_dumbbell_entries_have_three_black_vertices():
    catalog = {p.id: p for p in load_catalog()}
    for pattern_id in ('FIG10_G', 'FIG10_H', 'FIG27_A', 'FIG27_B'):
        assert (catalog[pattern_id].white, catalog[pattern_id].black) == (5, 3)


def test_skeleton_classification(load):
    catalog = load_catalog()
    skel = skeleton(label_subgraph(load('theta_pair').chart, 1)).chart
    assert classify_shape(skel, catalog) == 'THETA'


def _naive_equivalent(a, b):
    """Try every image of dart 0 and propagate along alpha and sigma"""
    if a.dart_count != b.dart_count:
        return False
    if not a.dart_count:
        return True
    for variant in ro_variants(b).values():
        for target in range(variant.dart_count):
            mapping, stack, ok = {0: target}, [0], True
            while stack and ok:
                d = stack.pop()
                for nxt, image in ((a.alpha(d), variant.alpha(mapping[d])), (a.sigma(d), variant.sigma(mapping[d]))):
                    if nxt not in mapping:
                        mapping[nxt] = image
                        stack.append(nxt)
                    elif mapping[nxt] != image:
                        ok = False
            if ok and len(mapping) == a.dart_count and verify_isomorphism(a, variant, mapping):
                return True
    return False


def test_catalog_matching_agrees_with_brute_force():
    shapes = [p for p in load_catalog() if not p.decorated]
    for a in shapes:
        for b in shapes:
            assert _naive_equivalent(a.prepared, b.prepared) == (a.code == b.code), (a.id, b.id)


def test_theta_skeleton_against_brute_force(load):
    skel = skeleton(label_subgraph(load('theta_pair').chart, 1)).chart
    theta = next(p for p in load_catalog() if p.id == 'THETA')
    assert _naive_equivalent(theta.prepared, prepare_shape(skel, False))


def _naive_loops(chart, m):
    """Label-m strands that leave a white vertex and come back to it"""
    found = set()
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
            if u == v:
                found.add(frozenset(chart.edge_of[p] for p in path))
    return found


def test_loops_agree_with_brute_force(load, inline, corpus):
    charts = [load(name).chart for name in FIXTURE_NAMES] + list(corpus) + [inline(LOOP_AT_WHITE).chart]
    for chart in charts:
        for m in range(1, chart.n):
            loops = find_loops(label_subgraph(chart, m))
            assert {frozenset(chart.edge_of[d] for d in c.darts) for c in loops} == _naive_loops(chart, m)
            assert len(loops) == len(_naive_loops(chart, m))
    assert len(_naive_loops(inline(LOOP_AT_WHITE).chart, 1)) == 1
