import json

import pytest

from chart import (Chart, VertexKind, chart_from_dict, chart_type, check_document, dumps_chart, loads_chart,
                   local_measures, measures, middle_darts, reflect, renumber, reverse, set_infinity, validate)
from errors import ChartFormatError, ChartValidationError
from tests.conftest import FIXTURE_NAMES


def test_empty_chart_is_valid():
    chart = Chart.empty(3)
    report = validate(chart)
    assert report.is_valid
    assert len(chart.regions) == 1
    assert measures(chart).complexity == (0, 0)
    assert chart_type(chart) is None


@pytest.mark.parametrize('name', FIXTURE_NAMES)
def test_fixtures_are_valid(load, name):
    report = validate(load(name).chart)
    assert report.is_valid, report.to_dict()


def test_crossing_with_adjacent_labels_is_rejected(inline):
    sketch = inline({
        'n': 4,
        'edges': {
            'a': {'label': 1, 'from': 'b1', 'to': 'x'},
            'b': {'label': 2, 'from': 'b2', 'to': 'x'},
            'c': {'label': 1, 'from': 'x', 'to': 'b3'},
            'd': {'label': 2, 'from': 'x', 'to': 'b4'},
        },
        'vertices': {'x': ['a', 'b', 'c', 'd']},
    })
    assert sketch.chart.kinds[sketch.names.vertex('x')] is VertexKind.CROSSING
    assert 'crossing-labels' in validate(sketch.chart).codes


def test_alternating_orientation_at_white_vertex_is_rejected(inline):
    sketch = inline({'vertices': {'w': ['in:1', 'out:2', 'in:1', 'out:2', 'in:1', 'out:2']}})
    report = validate(sketch.chart)
    assert not report.is_valid
    assert 'white-orientation' in report.codes


def test_label_outside_braid_range(inline):
    sketch = inline({'n': 2, 'edges': {'e': {'label': 2, 'from': 'b1', 'to': 'b2'}}})
    assert 'label-range' in validate(sketch.chart).codes


def test_single_hoop_splits_the_sphere(inline):
    chart = inline({'hoops': {'h': {'label': 1}}}).chart
    assert len(chart.regions) == 2
    assert chart.kinds == (VertexKind.MARKER,)
    assert measures(chart).complexity == (0, 0)
    assert validate(chart).is_valid


def test_hoops_are_simple_only_in_strict_mode(load):
    chart = load('hoops').chart
    assert validate(chart).is_valid
    assert 'simple-hoop' in validate(chart, strict=True).codes


def test_free_edge_is_flagged_in_strict_mode(load):
    chart = load('free_edge').chart
    assert measures(chart).f == 1
    assert 'free-edge' in validate(chart, strict=True).codes


def test_star_measures_and_middle_arcs(load):
    sketch = load('star')
    chart = sketch.chart
    m = measures(chart)
    assert (m.w, m.f, m.c, m.b) == (1, 0, 0, 6)
    w = sketch.names.vertex('w')
    assert middle_darts(chart, w) == (sketch.names.dart('w#1', 'head'), sketch.names.dart('w#4', 'tail'))


def _stub_at_vertex(sketch, index, token):
    return sketch.names.dart(f'w#{index}', 'head' if token.startswith('in') else 'tail')


def test_middle_arcs_follow_rotation(inline):
    tokens = ['in:1', 'in:2', 'in:1', 'out:2', 'out:1', 'out:2']
    for shift in range(0, 6, 2):
        rotated = tokens[shift:] + tokens[:shift]
        sketch = inline({'vertices': {'w': rotated}})
        inward, outward = middle_darts(sketch.chart, sketch.names.vertex('w'))
        i, o = (1 - shift) % 6, (4 - shift) % 6
        assert inward == _stub_at_vertex(sketch, i, rotated[i])
        assert outward == _stub_at_vertex(sketch, o, rotated[o])


def test_theta_pair_type_and_faces(load):
    chart = load('theta_pair').chart
    assert str(chart_type(chart)) == '(1; 2)'
    assert len(chart.vertices) - len(chart.edges) + len(chart.regions) == 2


def test_euler_relation_on_generated_charts(corpus):
    for chart in corpus:
        V, E, R = len(chart.vertices), len(chart.edges), len(chart.regions)
        assert V - E + R == 1 + chart.component_count


def test_symmetries_preserve_validity(load):
    chart = load('bridge_dumbbell').chart
    for variant in (reflect(chart), reverse(chart), reflect(reverse(chart))):
        assert validate(variant).is_valid
        assert measures(variant) == measures(chart)


def test_renumbering_preserves_validity(load):
    chart = load('theta_pair').chart
    perm = list(reversed(range(chart.dart_count)))
    assert validate(renumber(chart, perm)).is_valid
    with pytest.raises(ChartFormatError):
        renumber(chart, [0] * chart.dart_count)


def test_set_infinity(load):
    chart = load('theta_pair').chart
    moved = set_infinity(chart, (chart.infinity_face + 1) % len(chart.regions))
    assert moved.infinity_face != chart.infinity_face
    with pytest.raises(ChartFormatError):
        set_infinity(chart, len(chart.regions))


@pytest.mark.parametrize('name', FIXTURE_NAMES)
def test_canonical_text_is_stable(load, name):
    text = dumps_chart(load(name).chart)
    assert dumps_chart(loads_chart(text)) == text


def test_structural_errors_are_reported():
    doc = {'n': 3, 'opposite': [0, 1], 'vertices': [[0], [1]],
           'edges': [{'darts': [0, 1], 'label': 1, 'head': 1}]}
    assert not check_document(doc).is_valid
    with pytest.raises(ChartFormatError):
        chart_from_dict(doc)


def test_bad_json_raises_format_error():
    with pytest.raises(ChartFormatError):
        loads_chart('{"n": 3,')
    with pytest.raises(ChartFormatError):
        loads_chart(json.dumps([1, 2, 3]))


def test_local_measures(load):
    chart = load('m4_square').chart
    m = measures(chart)
    assert local_measures(chart, range(len(chart.vertices))) == (m.w, m.c)
    assert local_measures(chart, []) == (0, 0)


def test_type_of_a_white_vertex_with_three_labels(inline):
    sketch = inline({'n': 4, 'vertices': {'w': ['in:1', 'in:2', 'in:1', 'out:2', 'out:3', 'out:2']}})
    assert 'white-labels' in validate(sketch.chart).codes
    with pytest.raises(ChartValidationError) as info:
        chart_type(sketch.chart)
    assert info.value.exit_code == 1
    assert info.value.violations[0].code == 'white-labels'
