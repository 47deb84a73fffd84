"""
Chart Editor
Редактор диаграмм

Mutable scratch copy of a chart used by moves, loaders and the generator.
Darts and vertices live in dictionaries so surgery can add and drop them
freely; `freeze()` renumbers densely and rebuilds the region table.

Region bookkeeping works through tags: every dart remembers the region on
its right-hand side in the source chart. After surgery each face cycle
inherits the tags of its surviving darts; cycles sharing a tag belong to
one region, an untagged cycle opens a new one. A move that cuts a region in
two records a split hint naming a dart on the new side and the components
that go with it.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set, Tuple

import networkx as nx

from chart import Chart, Edge
from errors import ChartFormatError, ChartkitError

logger = logging.getLogger(__name__)


@dataclass
class SplitHint:
    anchor: int
    followers: List[int] = field(default_factory=list)


class ChartEditor:
    """Dictionary-backed combinatorial map with region tags"""

    def __init__(self, n: int):
        self.n = n
        self.alpha: Dict[int, int] = {}
        self.rotations: Dict[int, List[int]] = {}
        self.vertex: Dict[int, int] = {}
        self.labels: Dict[int, int] = {}
        self.heads: Set[int] = set()
        self.tags: Dict[int, int] = {}
        self.infinity_tag: Optional[int] = 0
        self.infinity_fallback: Optional[int] = None
        self.hints: List[SplitHint] = []
        self._next_dart = 0
        self._next_vertex = 0
        self._next_tag = 1

    @classmethod
    def from_chart(cls, chart: Chart) -> 'ChartEditor':
        editor = cls(chart.n)
        for v, rotation in enumerate(chart.vertices):
            editor.rotations[v] = list(rotation)
            for d in rotation:
                editor.vertex[d] = v
        for d, o in enumerate(chart.opposite):
            editor.alpha[d] = o
            editor.tags[d] = chart.region_of(d)
        for edge in chart.edges:
            for d in edge.darts:
                editor.labels[d] = edge.label
            if edge.head is not None:
                editor.heads.add(edge.head)
        editor.infinity_tag = chart.infinity_face
        editor._next_dart = chart.dart_count
        editor._next_vertex = len(chart.vertices)
        editor._next_tag = len(chart.regions)
        return editor

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------

    def rotation(self, v: int) -> List[int]:
        return self.rotations[v]

    def sigma(self, d: int, k: int = 1) -> int:
        rotation = self.rotations[self.vertex[d]]
        return rotation[(rotation.index(d) + k) % len(rotation)]

    def degree(self, v: int) -> int:
        return len(self.rotations[v])

    def label(self, d: int) -> int:
        return self.labels[d]

    def is_inward(self, d: int) -> Optional[bool]:
        if d in self.heads:
            return True
        if self.alpha[d] in self.heads:
            return False
        return None

    def tag_of(self, d: int) -> Optional[int]:
        return self.tags.get(d)

    # ------------------------------------------------------------------
    # Primitive surgery
    # ------------------------------------------------------------------

    def new_dart(self) -> int:
        d = self._next_dart
        self._next_dart += 1
        return d

    def new_tag(self) -> int:
        tag = self._next_tag
        self._next_tag += 1
        return tag

    def add_vertex(self, rotation: Iterable[int]) -> int:
        v = self._next_vertex
        self._next_vertex += 1
        self.set_rotation(v, rotation)
        return v

    def set_rotation(self, v: int, rotation: Iterable[int]):
        rotation = list(rotation)
        if len(set(rotation)) != len(rotation):
            raise ChartFormatError(f"rotation {rotation} repeats a dart")
        self.rotations[v] = rotation
        for d in rotation:
            self.vertex[d] = v

    def remove_vertex(self, v: int) -> List[int]:
        rotation = self.rotations.pop(v)
        for d in rotation:
            if self.vertex.get(d) == v:
                del self.vertex[d]
        return rotation

    def link(self, a: int, b: int, label: int, head: Optional[int] = None):
        """Pair darts a and b into one edge; head is a, b or None"""
        if head is not None and head not in (a, b):
            raise ChartFormatError(f"head {head} is not one of {a}, {b}")
        self.alpha[a] = b
        self.alpha[b] = a
        self.labels[a] = self.labels[b] = label
        self.heads.discard(a)
        self.heads.discard(b)
        if head is not None:
            self.heads.add(head)

    def new_edge(self, label: int, head_end: Optional[int] = None) -> Tuple[int, int]:
        """Two fresh darts (a, b) joined by an edge; head_end 0 or 1 picks the head"""
        a, b = self.new_dart(), self.new_dart()
        head = None if head_end is None else (a, b)[head_end]
        self.link(a, b, label, head)
        return a, b

    def drop_dart(self, d: int):
        """Forget a dart entirely; it must already be out of every rotation"""
        v = self.vertex.pop(d, None)
        if v is not None and d in self.rotations.get(v, []):
            self.rotations[v].remove(d)
            if not self.rotations[v]:
                del self.rotations[v]
        self.alpha.pop(d, None)
        self.labels.pop(d, None)
        self.heads.discard(d)
        self.tags.pop(d, None)

    def remove_edge(self, d: int):
        other = self.alpha[d]
        self.drop_dart(d)
        self.drop_dart(other)

    def swap_pairing(self, p: int, q: int):
        """Re-pair p with alpha(q) and q with alpha(p); labels must agree"""
        p2, q2 = self.alpha[p], self.alpha[q]
        if self.labels[p] != self.labels[q]:
            raise ChartFormatError("cannot re-pair edges of different labels")
        label = self.labels[p]
        head_pq = q2 if q2 in self.heads else (p if p in self.heads else None)
        head_qp = p2 if p2 in self.heads else (q if q in self.heads else None)
        self.link(p, q2, label, head_pq)
        self.link(q, p2, label, head_qp)

    def subdivide(self, d: int) -> Tuple[int, int]:
        """
        Put a joint on the edge of d.

        Returns:
            (j1, j2) where j1 pairs with d and j2 with the old opposite of d
        """
        other = self.alpha[d]
        label = self.labels[d]
        inward = self.is_inward(d)
        j1, j2 = self.new_dart(), self.new_dart()
        self.add_vertex([j1, j2])
        if inward is None:
            self.link(d, j1, label)
            self.link(j2, other, label)
        elif inward:
            self.link(d, j1, label, d)
            self.link(j2, other, label, j2)
        else:
            self.link(d, j1, label, j1)
            self.link(j2, other, label, other)
        if other in self.tags:
            self.tags[j1] = self.tags[other]
        if d in self.tags:
            self.tags[j2] = self.tags[d]
        return j1, j2

    def split_crossing(self, v: int) -> Tuple[int, int]:
        """Replace a crossing by two joints, one per diagonal; normalize() then straightens both strands"""
        c0, c1, c2, c3 = self.remove_vertex(v)
        return self.add_vertex([c0, c2]), self.add_vertex([c1, c3])

    def tag(self, d: int, region: Optional[int]):
        if region is None:
            self.tags.pop(d, None)
        else:
            self.tags[d] = region

    def retag(self, old: Optional[int], new: Optional[int]):
        """Every dart tagged old takes the tag new; the two regions become one"""
        if old is None or new is None or old == new:
            return
        for d, t in self.tags.items():
            if t == old:
                self.tags[d] = new
        if self.infinity_tag == old:
            self.infinity_tag = new

    def fresh(self, *darts: int):
        """Clear the region tag of the given darts"""
        for d in darts:
            self.tags.pop(d, None)

    def split(self, anchor: int, followers: Iterable[int] = ()):
        """The face of anchor becomes a new region together with the follower components"""
        self.hints.append(SplitHint(anchor, list(followers)))

    def set_infinity_fallback(self, d: int):
        self.infinity_fallback = d

    # ------------------------------------------------------------------
    # Normalisation and freezing
    # ------------------------------------------------------------------

    def _is_joint(self, v: int) -> bool:
        rotation = self.rotations[v]
        return len(rotation) == 2 and self.alpha[rotation[0]] != rotation[1]

    def normalize(self):
        """Dissolve degree-2 joints; a joint closing on itself stays as a hoop marker"""
        changed = True
        while changed:
            changed = False
            for v in sorted(self.rotations):
                if v not in self.rotations or not self._is_joint(v):
                    continue
                j1, j2 = self.rotations[v]
                x, y = self.alpha[j1], self.alpha[j2]
                if self.labels[j1] != self.labels[j2]:
                    raise ChartkitError(f"joint {v} joins labels {self.labels[j1]} and {self.labels[j2]}")
                into, out = self.is_inward(j1), self.is_inward(j2)
                if into is None and out is None:
                    head = None
                elif into is True and out is False:
                    head = y
                elif into is False and out is True:
                    head = x
                else:
                    raise ChartkitError(f"joint {v} joins incoherent orientations")
                label = self.labels[j1]
                self.remove_vertex(v)
                for d in (j1, j2):
                    self.alpha.pop(d, None)
                    self.labels.pop(d, None)
                    self.heads.discard(d)
                    self.tags.pop(d, None)
                if self.infinity_fallback == j2:
                    self.infinity_fallback = x
                elif self.infinity_fallback == j1:
                    self.infinity_fallback = y
                for hint in self.hints:
                    if hint.anchor == j2:
                        hint.anchor = x
                    elif hint.anchor == j1:
                        hint.anchor = y
                self.link(x, y, label, head)
                changed = True

    def freeze_connected(self) -> Tuple[Chart, Dict[int, int]]:
        """Freeze a connected map: every face cycle is its own region"""
        self.tags.clear()
        self.hints.clear()
        self.infinity_tag = None
        if self.infinity_fallback not in self.alpha and self.alpha:
            self.infinity_fallback = min(self.alpha)
        return self.freeze()

    def freeze(self, normalize: bool = True) -> Tuple[Chart, Dict[int, int]]:
        """
        Build an immutable chart from the current state.

        Returns:
            the chart and the map from editor dart ids to chart dart ids
        """
        if normalize:
            self.normalize()
        darts = sorted(self.alpha)
        if not darts:
            return Chart.empty(self.n), {}
        index = {d: i for i, d in enumerate(darts)}
        opposite = [index[self.alpha[d]] for d in darts]
        vertices = [[index[d] for d in rotation] for _, rotation in sorted(self.rotations.items())]
        edges = []
        for d in darts:
            o = self.alpha[d]
            if d < o:
                head = index[d] if d in self.heads else (index[o] if o in self.heads else None)
                edges.append(Edge((index[d], index[o]), self.labels[d], head))

        sigma = {}
        for rotation in self.rotations.values():
            for i, d in enumerate(rotation):
                sigma[d] = rotation[(i + 1) % len(rotation)]
        cycle_of: Dict[int, int] = {}
        cycles: List[List[int]] = []
        for start in darts:
            if start in cycle_of:
                continue
            cycle = []
            d = start
            while d not in cycle_of:
                cycle_of[d] = len(cycles)
                cycle.append(d)
                d = sigma[self.alpha[d]]
            cycles.append(cycle)

        graph = nx.Graph()
        for v, rotation in self.rotations.items():
            graph.add_node(('v', v))
        for d in darts:
            graph.add_edge(('v', self.vertex[d]), ('v', self.vertex[self.alpha[d]]))
        component = {}
        for number, part in enumerate(nx.connected_components(graph)):
            for node in part:
                component[node[1]] = number

        tags = nx.Graph()
        for i, cycle in enumerate(cycles):
            tags.add_node(('c', i))
            for d in cycle:
                if d in self.tags:
                    tags.add_edge(('c', i), ('t', self.tags[d]))
        group_of: Dict[int, int] = {}
        groups: List[Set[int]] = []
        for part in sorted(nx.connected_components(tags), key=lambda p: min(
                (cycles[n[1]][0] for n in p if n[0] == 'c'), default=-1)):
            members = {node[1] for node in part if node[0] == 'c'}
            if not members:
                continue
            for c in members:
                group_of[c] = len(groups)
            groups.append(members)

        infinity_group = None
        if self.infinity_tag is not None and tags.has_node(('t', self.infinity_tag)):
            for node in nx.node_connected_component(tags, ('t', self.infinity_tag)):
                if node[0] == 'c':
                    infinity_group = group_of[node[1]]
                    break

        for hint in self.hints:
            if hint.anchor not in cycle_of:
                raise ChartkitError(f"split anchor {hint.anchor} no longer exists")
            anchor_cycle = cycle_of[hint.anchor]
            old = group_of[anchor_cycle]
            moved = {anchor_cycle}
            for f in hint.followers:
                comp = component[self.vertex[f]]
                owned = [c for c in groups[old] if component[self.vertex[cycles[c][0]]] == comp]
                if len(owned) != 1:
                    raise ChartkitError(f"follower component of dart {f} does not face the split region")
                moved.add(owned[0])
            if moved == groups[old]:
                raise ChartkitError(f"split at dart {hint.anchor} leaves nothing behind")
            groups[old] -= moved
            for c in moved:
                group_of[c] = len(groups)
            groups.append(moved)

        for members in groups:
            seen = set()
            for c in members:
                comp = component[self.vertex[cycles[c][0]]]
                if comp in seen:
                    raise ChartkitError("ambiguous region split: a region meets one component twice")
                seen.add(comp)

        if infinity_group is None:
            if self.infinity_fallback is not None and self.infinity_fallback in cycle_of:
                infinity_group = group_of[cycle_of[self.infinity_fallback]]
            else:
                logger.warning("Point at infinity lost its region; placing it in the first region")
                infinity_group = 0

        regions = [[index[cycles[c][0]] for c in sorted(members)] for members in groups]
        chart = Chart.build(self.n, opposite, vertices, edges, regions, infinity_group)
        return chart, index
