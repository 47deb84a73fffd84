import random

from canonical import canonical_form, isomorphism, verify_isomorphism
from chart import reflect, renumber
from editor import ChartEditor
from tests.conftest import FIXTURE_NAMES


def _shuffled(chart, seed=5):
    perm = list(range(chart.dart_count))
    random.Random(seed).shuffle(perm)
    return renumber(chart, perm)


def test_dart_permutation_keeps_the_form(load):
    for name in FIXTURE_NAMES:
        chart = load(name).chart
        assert canonical_form(_shuffled(chart)) == canonical_form(chart), name


def test_reflection_is_identified_only_in_ro_mode(load):
    chart = load('bridge_dumbbell').chart
    mirror = reflect(chart)
    assert canonical_form(mirror, ro_mode=True) == canonical_form(chart, ro_mode=True)
    assert canonical_form(mirror) != canonical_form(chart)


def test_distinct_charts_have_distinct_forms(load):
    forms = {canonical_form(load(name).chart) for name in FIXTURE_NAMES}
    assert len(forms) == len(FIXTURE_NAMES)


def test_isomorphism_is_explicit(load):
    chart = load('m4_square').chart
    other = _shuffled(chart)
    iso = isomorphism(chart, other)
    assert iso is not None
    assert verify_isomorphism(chart, other, iso.mapping)
    assert isomorphism(chart, load('theta_pair').chart) is None


def test_editor_round_trip(corpus):
    for chart in corpus:
        rebuilt, _ = ChartEditor.from_chart(chart).freeze()
        assert canonical_form(rebuilt) == canonical_form(chart)
