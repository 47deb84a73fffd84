import pytest

from canonical import canonical_form
from chart import measures, validate
from errors import ChartkitError
from generator import SEED_NAMES, ChartGenerator, random_charts, seed_chart


@pytest.mark.parametrize('name', SEED_NAMES)
def test_seed_charts_are_valid(name):
    assert validate(seed_chart(name, n=4)).is_valid


def test_seed_chart_arguments():
    with pytest.raises(ChartkitError):
        seed_chart('theta', n=2)
    with pytest.raises(ChartkitError):
        seed_chart('pentagon')


def test_walks_are_reproducible():
    first = [canonical_form(g.chart) for g in random_charts(4, seed=3, walk_length=4)]
    second = [canonical_form(g.chart) for g in random_charts(4, seed=3, walk_length=4)]
    assert first == second


def test_generated_charts_respect_limits(corpus):
    for chart in corpus:
        assert validate(chart).is_valid
        m = measures(chart)
        assert m.w <= 6 and m.c <= 6


def test_walk_from_a_given_chart(load):
    generator = ChartGenerator(seed=1, max_white=4, max_crossings=2, kinds=['CIII', 'CI_R2'])
    chart, taken = generator.walk(load('double_c').chart, steps=3)
    assert len(taken) <= 3
    assert validate(chart).is_valid
    assert measures(chart).c <= 2


@pytest.mark.slow
def test_large_corpus_is_valid(large_corpus):
    for chart in large_corpus:
        assert validate(chart).is_valid
