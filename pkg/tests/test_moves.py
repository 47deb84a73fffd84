import os

import pytest

from canonical import canonical_form
from chart import Chart, measures, validate
from config import CatalogConfig
from domains import detect_m4_disks
from errors import MoveNotApplicable, SequenceAborted
from moves import (BACKWARD, FORWARD, MoveInstance, MoveKind, apply_move, apply_move_tracked, apply_sequence,
                   enumerate_moves, expand_moves, find_inverse, load_schemas, load_script, move_types,
                   replay_script)

TWO_FREE_EDGES = {
    'n': 4,
    'edges': {
        'e': {'label': 1, 'from': 'b1', 'to': 'b2'},
        'g': {'label': 3, 'from': 'b3', 'to': 'b4'},
    },
    'placements': {'b3': {'edge': 'e', 'side': 'right'}},
}


def test_every_registered_type_has_a_schema():
    schemas = load_schemas()
    for move_type in move_types():
        assert move_type in schemas


def test_move_type_selection():
    assert move_types(['CIII']) == [(MoveKind.CIII, BACKWARD), (MoveKind.CIII, FORWARD)]
    assert move_types(['CII:forward']) == [(MoveKind.CII, FORWARD)]
    assert move_types([(MoveKind.CI_R3, FORWARD)]) == [(MoveKind.CI_R3, FORWARD)]
    with pytest.raises(MoveNotApplicable):
        move_types(['CV'])
    with pytest.raises(MoveNotApplicable):
        move_types(['CI_R3:backward'])


def test_hoop_birth_on_the_empty_chart():
    chart = Chart.empty(3)
    instances = enumerate_moves(chart, ['CI_M1:forward'])
    # one region, labels 1 and 2, two orientations
    assert len(instances) == 4
    result, _, delta = apply_move_tracked(chart, instances[0])
    assert validate(result).is_valid
    assert delta['components'] == 1
    assert len(result.regions) == 2


def test_hoop_death_needs_an_empty_side(load):
    chart = load('hoops').chart
    instances = enumerate_moves(chart, ['CI_M1:backward'])
    assert len(instances) == 2
    for mv in instances:
        assert apply_move(chart, mv).component_count == 1


def test_hoop_birth_and_death_cancel(load):
    chart = load('theta_pair').chart
    mv = enumerate_moves(chart, ['CI_M1:forward'])[0]
    grown = apply_move(chart, mv)
    back = find_inverse(chart, grown, mv)
    assert back is not None
    assert canonical_form(apply_move(grown, back)) == canonical_form(chart)


def test_bigon_birth_adds_two_crossings(inline):
    chart = inline(TWO_FREE_EDGES).chart
    instances = enumerate_moves(chart, ['CI_R2:forward'])
    assert instances
    result, _, delta = apply_move_tracked(chart, instances[0])
    assert delta['c'] == 2
    assert measures(result).c == 2
    assert enumerate_moves(result, ['CI_R2:backward'])


def test_ciii_removes_a_white_vertex(load):
    chart = load('double_c').chart
    instances = enumerate_moves(chart, ['CIII:forward'])
    assert instances
    for mv in instances:
        _, _, delta = apply_move_tracked(chart, mv)
        assert delta['w'] == -1
        assert delta['f'] == 0


def test_ciii_is_not_offered_when_f_would_change(load):
    # each candidate would join two stubs into a free edge
    chart = load('star').chart
    assert enumerate_moves(chart, ['CIII:forward']) == []


def _assert_contracts(charts):
    schemas = load_schemas()
    for number, chart in enumerate(charts):
        for mv, result, delta in expand_moves(chart):
            assert validate(result).is_valid, (number, mv)
            for key, allowed in schemas[mv.move_type].contract.items():
                assert delta[key] in allowed, (number, mv, key, delta)


def test_contracts_hold_on_generated_charts(corpus):
    _assert_contracts(corpus)


@pytest.mark.slow
def test_contracts_hold_on_the_large_corpus(large_corpus):
    _assert_contracts(large_corpus)


def test_stale_instance_is_rejected(load):
    chart = load('theta_pair').chart
    with pytest.raises(MoveNotApplicable) as info:
        apply_move(chart, MoveInstance.make(MoveKind.CIII, FORWARD, (0,)))
    assert info.value.check == 'pattern'


def test_empty_sequence_is_identity(load):
    chart = load('star').chart
    result = apply_sequence(chart, [])
    assert result.chart is chart
    assert result.steps == []


def test_sequence_reports_the_failing_step(load):
    chart = load('double_c').chart
    first = enumerate_moves(chart, ['CIII:forward'])[0]
    with pytest.raises(SequenceAborted) as info:
        apply_sequence(chart, [first, MoveInstance.make(MoveKind.CI_R2, BACKWARD, (0,))])
    assert info.value.index == 1


def test_script_replay():
    script = load_script(os.path.join(CatalogConfig.SCRIPT_DIR, 'double_c_ciii.json'))
    result = replay_script(script)
    assert [step.delta['w'] for step in result.steps] == [-1, -1]
    final = measures(result.chart)
    assert final.w == script.expect['w'] == 2
    assert final.f == script.expect['f']


def test_terminal_edge_pushed_across_a_strand_closes_a_square(load):
    base = load('square_precursor').chart
    assert detect_m4_disks(base, 2) == []
    script = load_script(os.path.join(CatalogConfig.SCRIPT_DIR, 'square_precursor_ciii.json'))
    result = replay_script(script)
    assert [step.delta['w'] for step in result.steps] == [1]
    assert validate(result.chart).is_valid
    final = measures(result.chart)
    assert (final.w, final.f) == (script.expect['w'], script.expect['f'])
    disks = detect_m4_disks(result.chart, 2)
    assert len(disks) == 1
    assert len(set(disks[0].whites)) == 4
    assert disks[0].lower.kind == disks[0].upper.kind == 'internal'


def test_bigon_birth_is_undone_by_bigon_death(inline):
    chart = inline(TWO_FREE_EDGES).chart
    for mv in enumerate_moves(chart, ['CI_R2:forward']):
        grown = apply_move(chart, mv)
        back = find_inverse(chart, grown, mv)
        assert back is not None, mv
        assert back.move_type == (MoveKind.CI_R2, BACKWARD)


HOOP_BESIDE_EDGE = {
    'n': 4,
    'edges': {'e': {'label': 1, 'from': 'b1', 'to': 'b2'}},
    'hoops': {
        'h': {'label': 1, 'direction': 'ccw', 'in': {'edge': 'e', 'side': 'right'}},
        'g': {'label': 3, 'direction': 'ccw', 'in': {'edge': 'h', 'side': 'inner'}},
    },
}


def test_hoop_split_from_an_arc_is_undone(load):
    chart = load('double_c').chart
    singles = [mv for mv in enumerate_moves(chart, ['CI_M2:forward']) if len(mv.anchors) == 1]
    assert singles
    for mv in singles:
        grown = apply_move(chart, mv)
        assert grown.component_count == chart.component_count + 1
        back = find_inverse(chart, grown, mv)
        assert back is not None, mv
        assert len(back.anchors) == 2


def test_absorbed_hoop_hands_its_inside_across_the_edge(inline):
    chart = inline(HOOP_BESIDE_EDGE).chart
    assert len(chart.regions) == 3
    merges = enumerate_moves(chart, ['CI_M2:backward'])
    assert merges
    for mv in merges:
        result = apply_move(chart, mv)
        # the free edge swallows h and g moves out to the region of the edge
        assert result.component_count == 2
        assert len(result.regions) == 2
        assert find_inverse(chart, result, mv) is not None


def _assert_inverse_law(charts):
    for number, chart in enumerate(charts):
        for mv, result, _ in expand_moves(chart):
            assert find_inverse(chart, result, mv) is not None, (number, mv)


def test_every_move_has_an_inverse(corpus):
    _assert_inverse_law(corpus)


@pytest.mark.slow
def test_every_move_has_an_inverse_on_the_large_corpus(large_corpus):
    _assert_inverse_law(large_corpus)
