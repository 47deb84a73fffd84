"""
Canonical forms and isomorphism
Канонические формы и изоморфизм

Each connected component is coded by a breadth-first walk over its darts
from a root dart, following sigma then opposite. A face cycle carries the
sorted codes of the components hanging in the region beyond it, so the
nesting of components on the sphere is part of the code. The chart code is
the minimum over all roots; RO mode takes the minimum over the four
variants G, G*, r(G), r(G*). The point at infinity is ignored.
"""

import hashlib
import json
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from chart import Chart, reflect, reverse

logger = logging.getLogger(__name__)

Code = Tuple


@dataclass(frozen=True)
class Isomorphism:
    """Dart map from one chart onto an RO variant of another"""
    variant: str
    mapping: Dict[int, int]


class _Coder:
    def __init__(self, chart: Chart):
        self.chart = chart
        self._via: Dict[int, Tuple[Code, List[int]]] = {}
        self._active: set = set()

    def _head_flag(self, d: int) -> int:
        head = self.chart.edge(d).head
        if head is None:
            return 2
        return 1 if head == d else 0

    def hung(self, cycle: int) -> Tuple[Code, List[int]]:
        """Codes and dart orders of the components beyond a face cycle"""
        chart = self.chart
        region = chart.region_of_cycle[cycle]
        items = [self.via(other) for other in chart.cycles_in_region(region) if other != cycle]
        items.sort(key=lambda item: item[0])
        order: List[int] = []
        for _, sub in items:
            order.extend(sub)
        return tuple(code for code, _ in items), order

    def via(self, cycle: int) -> Tuple[Code, List[int]]:
        """Code of the component entered through one of its face cycles"""
        if cycle in self._via:
            return self._via[cycle]
        if cycle in self._active:
            raise ValueError("region nesting is not a tree")
        self._active.add(cycle)
        best = None
        for root in self.chart.face_cycles[cycle]:
            candidate = self.walk(root, cycle)
            if best is None or candidate[0] < best[0]:
                best = candidate
        self._active.discard(cycle)
        self._via[cycle] = best
        return best

    def walk(self, root: int, parent_cycle: Optional[int]) -> Tuple[Code, List[int]]:
        chart = self.chart
        number = {root: 0}
        order = [root]
        i = 0
        while i < len(order):
            d = order[i]
            for x in (chart.sigma(d), chart.alpha(d)):
                if x not in number:
                    number[x] = len(order)
                    order.append(x)
            i += 1
        entries = []
        tail: List[int] = []
        seen_cycles = set()
        for d in order:
            cycle = chart.cycle_of[d]
            hung: Code = ()
            if cycle not in seen_cycles:
                seen_cycles.add(cycle)
                if cycle != parent_cycle:
                    hung, sub = self.hung(cycle)
                    tail.extend(sub)
            entries.append((number[chart.sigma(d)], number[chart.alpha(d)], chart.label(d),
                            self._head_flag(d), hung))
        return tuple(entries), order + tail

    def top(self) -> Tuple[Code, List[int]]:
        chart = self.chart
        if chart.dart_count == 0:
            return (chart.n, ()), []
        best = None
        for root in range(chart.dart_count):
            candidate = self.walk(root, None)
            if best is None or candidate[0] < best[0]:
                best = candidate
        return (chart.n, best[0]), best[1]


def canonical_labeling(chart: Chart) -> Tuple[Code, List[int]]:
    """Canonical code and the dart order realising it"""
    return _Coder(chart).top()


def ro_variants(chart: Chart) -> Dict[str, Chart]:
    """The RO-family {G, G*, r(G), r(G*)}"""
    reversed_chart = reverse(chart)
    return {
        'G': chart,
        'G*': reversed_chart,
        'rG': reflect(chart),
        'rG*': reflect(reversed_chart),
    }


def canonical_code(chart: Chart, ro_mode: bool = False) -> Code:
    if not ro_mode:
        return canonical_labeling(chart)[0]
    return min(canonical_labeling(variant)[0] for variant in ro_variants(chart).values())


def canonical_form(chart: Chart, ro_mode: bool = False) -> bytes:
    """Byte string equal for two charts exactly when they are isomorphic"""
    code = canonical_code(chart, ro_mode)
    return json.dumps(code, separators=(',', ':')).encode('utf-8')


def form_digest(form: bytes) -> str:
    return hashlib.sha256(form).hexdigest()


def verify_isomorphism(a: Chart, b: Chart, mapping: Dict[int, int]) -> bool:
    """Check that mapping carries every dart relation, label, head and region of a onto b"""
    if a.n != b.n or a.dart_count != b.dart_count or len(mapping) != a.dart_count:
        return False
    if sorted(mapping.values()) != list(range(b.dart_count)):
        return False
    region_map: Dict[int, int] = {}
    for d in range(a.dart_count):
        m = mapping[d]
        if mapping[a.alpha(d)] != b.alpha(m) or mapping[a.sigma(d)] != b.sigma(m):
            return False
        if a.label(d) != b.label(m) or a.is_inward(d) != b.is_inward(m):
            return False
        ra, rb = a.region_of(d), b.region_of(m)
        if region_map.setdefault(ra, rb) != rb:
            return False
    return len(set(region_map.values())) == len(region_map)


def isomorphism(a: Chart, b: Chart, ro_mode: bool = False) -> Optional[Isomorphism]:
    """
    Explicit dart map from a onto b (or onto an RO variant of b in RO mode).

    Returns:
        the verified isomorphism, or None when the charts differ
    """
    code_a, order_a = canonical_labeling(a)
    variants = ro_variants(b) if ro_mode else {'G': b}
    for name, variant in variants.items():
        code_b, order_b = canonical_labeling(variant)
        if code_a != code_b:
            continue
        mapping = dict(zip(order_a, order_b))
        if verify_isomorphism(a, variant, mapping):
            return Isomorphism(variant=name, mapping=mapping)
        logger.error(f"Equal canonical codes but the induced dart map is not an isomorphism ({name})")
    return None
