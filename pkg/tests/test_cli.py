import json
import os

import pytest
from click.testing import CliRunner

from cli import cli
from config import CatalogConfig
from tests.conftest import fixture_path


@pytest.fixture
def run():
    runner = CliRunner()
    return lambda *args: runner.invoke(cli, list(args))


def test_validate_valid_fixture(run):
    result = run('validate', fixture_path('theta_pair'))
    assert result.exit_code == 0
    assert 'valid' in result.output


def test_validate_invalid_chart(run, tmp_path):
    path = tmp_path / 'bad.json'
    path.write_text(json.dumps({'format': 'sketch', 'n': 3,
                                'vertices': {'w': ['in:1', 'out:2', 'in:1', 'out:2', 'in:1', 'out:2']}}))
    result = run('--format', 'json', 'validate', str(path))
    assert result.exit_code == 1
    assert 'white-orientation' in result.output


def test_malformed_file_is_a_format_error(run, tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{"n": 3, "opposite": [0, 1]')
    assert run('validate', str(path)).exit_code == 2


def test_unknown_option_is_a_usage_error(run):
    assert run('validate', '--loud', fixture_path('star')).exit_code == 2


def test_analyze_json(run):
    result = run('--format', 'json', 'analyze', fixture_path('theta_pair'), '--label', '1')
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report['chains']['internal'] == 3
    assert len(report['angled_disks']) == 6


def test_moves_list_and_apply(run, tmp_path):
    listing = run('--format', 'json', 'moves', 'list', fixture_path('double_c'), '--kind', 'CIII:forward')
    assert listing.exit_code == 0
    assert json.loads(listing.output)['moves']
    out = tmp_path / 'after.json'
    applied = run('moves', 'apply', fixture_path('double_c'), '--kind', 'CIII:forward', '--index', '0',
                  '-o', str(out))
    assert applied.exit_code == 0
    assert run('validate', str(out)).exit_code == 0


def test_moves_replay(run):
    result = run('moves', 'replay', os.path.join(CatalogConfig.SCRIPT_DIR, 'double_c_ciii.json'))
    assert result.exit_code == 0
    assert 'final w=2' in result.output


def test_io_check_scenarios(run):
    assert run('io-check', '--scenario', CatalogConfig.SCENARIO_FILE).exit_code == 0


def test_io_check_all_faces(run, corpus, tmp_path):
    from chart import save_chart
    for index, chart in enumerate(corpus):
        path = tmp_path / f'generated_{index}.json'
        save_chart(chart, str(path))
        for k in range(1, chart.n):
            assert run('io-check', str(path), '--label', str(k), '--all-faces').exit_code == 0


def test_detect_reports_the_bridge_dumbbell(run):
    result = run('--format', 'json', 'detect', fixture_path('bridge_dumbbell'))
    assert result.exit_code == 0
    patterns = {p['pattern'] for p in json.loads(result.output)['patterns']}
    assert 'FIG10_G' in patterns


def test_enumerate_writes_a_manifest(run, tmp_path):
    out = tmp_path / 'manifest.json'
    result = run('enumerate', '--white', '2', '--no-loop', '-o', str(out))
    assert result.exit_code == 0
    manifest = json.loads(out.read_text())
    assert [level['white'] for level in manifest['levels']] == [1, 2]


def test_reduce_writes_a_certificate(run, tmp_path):
    out = tmp_path / 'certificate.json'
    result = run('reduce', fixture_path('double_c'), '--max-states', '500', '--max-depth', '2',
                 '--kind', 'CIII:forward', '-o', str(out))
    assert result.exit_code == 0
    assert json.loads(out.read_text())['status'] == 'certificate'


def test_render(run, tmp_path):
    out = tmp_path / 'chart.svg'
    assert run('render', fixture_path('m4_square'), '-o', str(out)).exit_code == 0
    assert out.read_text().count('<polyline') > 0
