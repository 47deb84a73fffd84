"""Shared fixtures for the chartkit test suite"""

import os

import pytest

from config import CatalogConfig
from generator import ChartGenerator
from sketch import load_sketch, load_sketch_doc

# Size of the generated corpora; the slow tests use ten times as many
TEST_CHARTS = int(os.environ.get('CHARTKIT_TEST_CHARTS', '6'))

FIXTURE_NAMES = ['theta_pair', 'star', 'hoops', 'free_edge', 'm4_square', 'bridge_dumbbell', 'two_bigon_dumbbell',
                 'feeler_dumbbell', 'triangle_with_bigon', 'square_precursor', 'double_c']


def fixture_path(name: str) -> str:
    return os.path.join(CatalogConfig.FIXTURE_DIR, f'{name}.json')


@pytest.fixture
def load():
    """Load a committed fixture sketch by name"""
    return lambda name: load_sketch(fixture_path(name))


@pytest.fixture
def inline():
    """Build a sketch from a dict written in the test"""
    def build(doc, n=3):
        return load_sketch_doc(dict(doc, format='sketch', n=doc.get('n', n)))
    return build


@pytest.fixture(scope='session')
def corpus():
    return [g.chart for g in ChartGenerator(seed=7, walk_length=5).corpus(TEST_CHARTS)]


@pytest.fixture(scope='session')
def large_corpus():
    return [g.chart for g in ChartGenerator(seed=11, walk_length=10).corpus(10 * TEST_CHARTS)]
