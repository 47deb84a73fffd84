import json
from collections import Counter
from itertools import combinations

import pytest

from chart import Chart, Edge, measures
from config import SearchConfig
from errors import BudgetError, ChartFormatError
from moves import enumerate_moves
from search import Exhausted, ReductionCertificate, ShapeLevels, enumerate_skeletons, load_certificate, reduce
from store import StateStore
from structure import load_catalog, shape_code


@pytest.fixture(scope='module')
def levels():
    return ShapeLevels(workers=2)


def test_theta_is_the_loop_free_two_vertex_class(levels):
    classes = enumerate_skeletons(2, no_loop=True, catalog=load_catalog(), levels=levels)
    assert all(c.white == 2 and c.loop_free for c in classes)
    closed = [c for c in classes if c.black == 0]
    assert [c.tag for c in closed] == ['THETA']


def test_loop_filter_only_removes(levels):
    every = enumerate_skeletons(2, levels=levels)
    loop_free = enumerate_skeletons(2, no_loop=True, levels=levels)
    assert {c.digest for c in loop_free} < {c.digest for c in every}


def test_component_size_filter(levels):
    assert enumerate_skeletons(2, min_component_w=3, levels=levels) == []


def test_enumeration_budget():
    with pytest.raises(BudgetError):
        enumerate_skeletons(SearchConfig.MAX_WHITE + 1)


def test_skeletons_are_stored(levels):
    store = StateStore()
    classes = enumerate_skeletons(2, no_loop=True, store=store, levels=levels)
    assert len(store.skeletons(white=2)) == len(classes)
    store.close()


@pytest.mark.slow
def test_five_vertex_catalog_shapes_are_enumerated_once(levels):
    catalog = load_catalog()
    tags = Counter(c.tag for c in enumerate_skeletons(5, no_loop=True, catalog=catalog, levels=levels))
    wanted = {p.id for p in catalog if p.white == 5 and not p.decorated}
    assert len(wanted) == 9
    assert {tag: tags[tag] for tag in wanted} == dict.fromkeys(wanted, 1)


def _matchings(darts):
    if not darts:
        yield []
        return
    first, rest = darts[0], darts[1:]
    for i, other in enumerate(rest):
        for tail in _matchings(rest[:i] + rest[i + 1:]):
            yield [(first, other)] + tail


def _naive_shape_codes(white, no_loop=False):
    """Every gluing of `white` trivalent vertices and some leaves that is connected and planar"""
    codes = set()
    trivalent = list(range(3 * white))
    for black in range(white % 2, white + 3, 2):
        for attached in combinations(trivalent, black):
            rest = [d for d in trivalent if d not in attached]
            for matching in _matchings(rest):
                if no_loop and any(a // 3 == b // 3 for a, b in matching):
                    continue
                pairs = matching + [(d, 3 * white + i) for i, d in enumerate(attached)]
                opposite = [0] * (3 * white + black)
                for a, b in pairs:
                    opposite[a], opposite[b] = b, a
                vertices = ([[3 * v, 3 * v + 1, 3 * v + 2] for v in range(white)]
                            + [[3 * white + i] for i in range(black)])
                try:
                    chart = Chart.build(2, opposite, vertices, [Edge(tuple(sorted(p)), 1, None) for p in pairs])
                except ChartFormatError:
                    continue
                if len(vertices) - len(pairs) + len(chart.face_cycles) == 2:
                    codes.add(shape_code(chart))
    return codes


@pytest.mark.parametrize('white', [1, 2, 3])
def test_small_enumerations_agree_with_brute_force(levels, white):
    every = enumerate_skeletons(white, levels=levels)
    assert {c.code for c in every} == _naive_shape_codes(white)
    assert len(every) == len(_naive_shape_codes(white))
    loop_free = enumerate_skeletons(white, no_loop=True, levels=levels)
    assert {c.code for c in loop_free} == _naive_shape_codes(white, no_loop=True)


def test_empty_chart_is_minimal():
    outcome = reduce(Chart.empty(3), max_states=50, max_depth=2, workers=1)
    assert isinstance(outcome, Exhausted)
    assert outcome.reason == 'closed'


def test_reduction_of_double_c(load, tmp_path):
    chart = load('double_c').chart
    outcome = reduce(chart, max_states=500, max_depth=2, kinds=['CIII:forward'], workers=2, greedy=True)
    assert isinstance(outcome, ReductionCertificate)
    assert outcome.before.w == 4
    assert outcome.after.w == 2
    assert len(outcome.moves) == 2
    assert outcome.rounds == 3
    assert outcome.verify()

    path = tmp_path / 'certificate.json'
    path.write_text(json.dumps(outcome.to_dict()))
    loaded = load_certificate(str(path))
    assert loaded.verify()
    assert measures(loaded.final).w == 2


def test_first_certificate_takes_the_least_path(load):
    chart = load('double_c').chart
    outcome = reduce(chart, max_states=500, max_depth=2, kinds=['CIII:forward'], workers=2)
    assert isinstance(outcome, ReductionCertificate)
    assert outcome.rounds == 1
    assert outcome.after.w == 3
    assert outcome.moves == [min(enumerate_moves(chart, ['CIII:forward']))]
    assert outcome.verify()


def test_budget_must_be_positive(load):
    with pytest.raises(BudgetError):
        reduce(load('star').chart, max_states=0)
