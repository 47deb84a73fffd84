"""
Random chart generator
Генератор случайных диаграмм

Random valid charts built by random walks of C-moves from a handful of seed
charts. Walks are reproducible: the same seed, seed chart and limits give
the same chart.
"""

import logging
import random
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple

from chart import Chart, measures, validate
from config import GeneratorConfig
from errors import ChartkitError
from moves import MoveInstance, expand_moves
from sketch import load_sketch_doc

logger = logging.getLogger(__name__)

# Seed charts, written for labels 1 and 2; any n >= 3 works
SEED_SKETCHES: Dict[str, Dict[str, Any]] = {
    'hoops': {
        'format': 'sketch',
        'hoops': {
            'h1': {'label': 1, 'direction': 'ccw'},
            'h2': {'label': 2, 'direction': 'cw', 'in': {'edge': 'h1', 'side': 'inner'}},
        },
    },
    'free_edge': {
        'format': 'sketch',
        'edges': {'e': {'label': 1, 'from': 'b1', 'to': 'b2'}},
    },
    'theta': {
        'format': 'sketch',
        'edges': {
            'a': {'label': 1, 'from': 'w2', 'to': 'w1'},
            'b': {'label': 2, 'from': 'w2', 'to': 'w1'},
            'c': {'label': 1, 'from': 'w2', 'to': 'w1'},
            'd': {'label': 2, 'from': 'w1', 'to': 'w2'},
            'e': {'label': 1, 'from': 'w1', 'to': 'w2'},
            'f': {'label': 2, 'from': 'w1', 'to': 'w2'},
        },
        'vertices': {
            'w1': ['a', 'b', 'c', 'd', 'e', 'f'],
            'w2': ['f', 'e', 'd', 'c', 'b', 'a'],
        },
    },
    'star': {
        'format': 'sketch',
        'vertices': {'w': ['in:1', 'in:2', 'in:1', 'out:2', 'out:1', 'out:2']},
    },
}

SEED_NAMES = ('empty',) + tuple(SEED_SKETCHES)


def seed_chart(name: str, n: int = 3) -> Chart:
    """One of the named seed charts with braid degree n"""
    if n < 3:
        raise ChartkitError(f"seed charts need n >= 3, got {n}")
    if name == 'empty':
        return Chart.empty(n)
    if name not in SEED_SKETCHES:
        raise ChartkitError(f"unknown seed chart {name!r}")
    doc = dict(SEED_SKETCHES[name], n=n)
    return load_sketch_doc(doc, name=name).chart


@dataclass
class GeneratedChart:
    chart: Chart
    seed: str
    moves: List[MoveInstance] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'seed': self.seed,
            'moves': [mv.to_dict() for mv in self.moves],
            'measures': measures(self.chart).to_dict(),
            'chart': self.chart.to_dict(),
        }


class ChartGenerator:
    """Random move walks from the seed charts"""

    def __init__(self, n: int = 3, seed: Optional[int] = None, walk_length: Optional[int] = None,
                 max_white: Optional[int] = None, max_crossings: Optional[int] = None,
                 kinds: Optional[Iterable[str]] = None):
        self.n = n
        self.rng = random.Random(GeneratorConfig.SEED if seed is None else seed)
        self.walk_length = GeneratorConfig.WALK_LENGTH if walk_length is None else walk_length
        self.max_white = GeneratorConfig.MAX_WHITE if max_white is None else max_white
        self.max_crossings = GeneratorConfig.MAX_CROSSINGS if max_crossings is None else max_crossings
        self.kinds = list(kinds) if kinds is not None else None

    def _within_limits(self, chart: Chart) -> bool:
        m = measures(chart)
        return m.w <= self.max_white and m.c <= self.max_crossings

    def walk(self, start: Chart, steps: Optional[int] = None) -> Tuple[Chart, List[MoveInstance]]:
        """Apply up to `steps` random moves, stopping early when nothing stays within the limits"""
        chart, taken = start, []
        for _ in range(self.walk_length if steps is None else steps):
            options = [(mv, result) for mv, result, _ in expand_moves(chart, self.kinds)
                       if self._within_limits(result)]
            if not options:
                logger.debug(f"Walk stopped after {len(taken)} moves: no move within limits")
                break
            mv, chart = self.rng.choice(options)
            taken.append(mv)
        return chart, taken

    def generate(self, seed_name: Optional[str] = None) -> GeneratedChart:
        seed_name = seed_name or self.rng.choice(SEED_NAMES)
        chart, taken = self.walk(seed_chart(seed_name, self.n))
        report = validate(chart)
        if not report.is_valid:
            # moves audit every result, so this is a move bug
            logger.error(f"Generated chart from {seed_name} is invalid: {sorted(report.codes)}")
            raise ChartkitError(f"generator produced an invalid chart from {seed_name}")
        return GeneratedChart(chart=chart, seed=seed_name, moves=taken)

    def corpus(self, count: int) -> List[GeneratedChart]:
        charts = [self.generate() for _ in range(count)]
        logger.info(f"Generated {len(charts)} random charts")
        return charts


def random_charts(count: int, seed: Optional[int] = None, **options) -> List[GeneratedChart]:
    """Convenience wrapper: `count` charts from one generator"""
    return ChartGenerator(seed=seed, **options).corpus(count)
