import pytest

from chart import VertexKind
from errors import ChartFormatError
from sketch import load_sketch_doc


def test_names_resolve_to_chart_ids(load):
    sketch = load('theta_pair')
    chart, names = sketch.chart, sketch.names
    w1, w2 = names.vertex('w1'), names.vertex('w2')
    assert chart.kinds[w1] is VertexKind.WHITE
    tail, head = names.edges['a']
    assert chart.vertex_of[tail] == w2
    assert chart.vertex_of[head] == w1
    assert chart.alpha(tail) == head
    assert chart.is_inward(head) is True


def test_side_darts_face_the_named_side(load):
    sketch = load('theta_pair')
    names, chart = sketch.names, sketch.chart
    right, left = names.side_dart('a', 'right'), names.side_dart('a', 'left')
    assert right == names.dart('a', 'tail')
    assert chart.region_of(right) != chart.region_of(left)
    assert chart.region_of(left) == chart.infinity_face


def test_stubs_get_black_vertices(load):
    sketch = load('star')
    chart = sketch.chart
    for index in range(6):
        tail, head = sketch.names.edges[f'w#{index}']
        ends = {chart.kinds[chart.vertex_of[tail]], chart.kinds[chart.vertex_of[head]]}
        assert ends == {VertexKind.WHITE, VertexKind.BLACK}


def test_hoop_placement(load):
    sketch = load('hoops')
    chart = sketch.chart
    inner1, outer1 = sketch.names.hoops['h1']
    inner2, outer2 = sketch.names.hoops['h2']
    assert chart.region_of(outer2) == chart.region_of(inner1)
    assert chart.region_of(outer1) == chart.infinity_face
    assert chart.component_count == 2


@pytest.mark.parametrize('doc', [
    {'format': 'sketch'},
    {'format': 'sketch', 'n': 3, 'edges': {'e': {'label': 1}}},
    {'format': 'sketch', 'n': 3, 'edges': {'e': {'label': 1, 'from': 'u', 'to': 'v'}},
     'vertices': {'u': ['f']}},
    {'format': 'sketch', 'n': 3, 'edges': {'l': {'label': 1, 'from': 'u', 'to': 'u'}},
     'vertices': {'u': ['l', 'l']}},
    {'format': 'chart'},
])
def test_malformed_sketches(doc):
    with pytest.raises(ChartFormatError):
        load_sketch_doc(doc)


def test_unknown_names(load):
    names = load('theta_pair').names
    with pytest.raises(ChartFormatError):
        names.vertex('nowhere')
    with pytest.raises(ChartFormatError):
        names.dart('zz')
    with pytest.raises(ChartFormatError):
        names.side_dart('a', 'up')
