"""End-to-end tests for the dynamap command line."""
import contextlib
import json
import os
import sys

import pandas as pd
import pytest

import logger_setup
from main import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main, parse_run_config

SCENARIO_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'scenarios')
DEMO = os.path.join(SCENARIO_DIR, 'demo_two_qubit.json')
PRODUCT = os.path.join(SCENARIO_DIR, 'product_two_qubit.json')


@pytest.mark.parametrize("dim", [1, 2, 5])
def test_basis_export(tmp_path, dim):
    out = tmp_path / 'basis.json'
    assert main(['basis', '--dim', str(dim), '--out', str(out)]) == EXIT_OK
    data = json.loads(out.read_text())
    assert data['dim'] == dim
    assert len(data['elements']) == dim * dim
    assert data['gram_residual'] <= 1e-10


def test_basis_to_stdout(capsys):
    assert main(['basis', '--dim', '2']) == EXIT_OK
    assert json.loads(capsys.readouterr().out)['dim'] == 2


def test_basis_rejects_zero_dimension():
    assert main(['basis', '--dim', '0']) == EXIT_USAGE


def test_analyze_at_time_zero(tmp_path):
    out = tmp_path / 'report.json'
    assert main(['analyze', '--scenario', DEMO, '--time', '0', '--out', str(out)]) == EXIT_OK
    report = json.loads(out.read_text())[0]
    assert report['is_cp'] is True
    assert report['offset_norm'] <= 1e-10


def test_analyze_reports_cp_violation_without_failing(tmp_path):
    out = tmp_path / 'report.json'
    assert main(['analyze', '--scenario', DEMO, '--time', '0.15', '--out', str(out)]) == EXIT_OK
    report = json.loads(out.read_text())[0]
    assert report['is_cp'] is False
    assert report['is_cp_cp_part'] is True


def test_analyze_rejects_non_hermitian_scenario(tmp_path, capsys):
    with open(DEMO) as f:
        data = json.load(f)
    data['hamiltonian'][0][1] = [0.3, 0.0]
    path = tmp_path / 'bad.json'
    path.write_text(json.dumps(data))
    assert main(['analyze', '--scenario', str(path), '--time', '1']) == EXIT_USAGE
    assert 'hamiltonian[0][1]' in capsys.readouterr().err


def test_analyze_missing_file(tmp_path):
    assert main(['analyze', '--scenario', str(tmp_path / 'none.json'), '--time', '1']) == EXIT_USAGE


@pytest.mark.parametrize("value", ["inf", "nan"])
def test_analyze_rejects_non_finite_time(value, capsys):
    assert main(['analyze', '--scenario', DEMO, '--time', value]) == EXIT_USAGE
    assert '--time must be finite' in capsys.readouterr().err


def test_sweep_single_point(tmp_path):
    out = tmp_path / 'sweep.csv'
    assert main(['sweep', '--scenario', PRODUCT, '--t0', '0', '--t1', '0', '--steps', '1', '--out', str(out)]) == EXIT_OK
    frame = pd.read_csv(out)
    assert len(frame) == 1
    assert frame['t'][0] == 0.0


def test_sweep_product_scenario_is_cp(tmp_path):
    out = tmp_path / 'sweep.csv'
    assert main(['sweep', '--scenario', PRODUCT, '--t0', '0', '--t1', '2', '--steps', '5', '--out', str(out)]) == EXIT_OK
    frame = pd.read_csv(out)
    assert list(frame['t']) == [0.0, 0.5, 1.0, 1.5, 2.0]
    assert frame['is_cp_full'].all()
    d_columns = [c for c in frame.columns if c.startswith('d_')]
    assert d_columns == ['d_1', 'd_2', 'd_3']
    assert (frame[d_columns].abs() <= 1e-10).all().all()


@pytest.mark.parametrize("grid", [['0', '1', '0'], ['1', '0', '3'], ['0', 'inf', '3'], ['nan', '1', '3']])
def test_sweep_rejects_invalid_grid(grid):
    t0, t1, steps = grid
    assert main(['sweep', '--scenario', DEMO, '--t0', t0, '--t1', t1, '--steps', steps]) == EXIT_USAGE


def test_unknown_tolerance_key(restore_tolerances):
    assert main(['--tol', 'loose=1', 'basis', '--dim', '2']) == EXIT_USAGE


def test_missing_command_exits_with_usage():
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == EXIT_USAGE


def test_run_config_parsing():
    run = parse_run_config(['--seed', '7', '--tol', 'psd=1e-8', 'sweep', '--scenario', DEMO,
                            '--t0', '0', '--t1', '1', '--steps', '3'])
    assert run.seed == 7
    assert run.tolerance_overrides == {'psd': 1e-8}
    assert run.time_grid == (0.0, 1.0, 3)
    assert run.format == 'csv'


def test_demo_is_deterministic(tmp_path, capsys):
    first, second = tmp_path / 'a', tmp_path / 'b'
    assert main(['demo', '--out', str(first)]) == EXIT_OK
    assert main(['demo', '--out', str(second)]) == EXIT_OK
    assert (first / 'sweep.csv').read_text() == (second / 'sweep.csv').read_text()

    summary = json.loads((first / 'summary.json').read_text())
    assert summary['witness_time'] is not None
    assert summary['min_choi_full'] < -1e-3
    assert summary['all_cp_part']
    assert summary['assignment_min_eigenvalue'] > 0
    assert 'witness t =' in capsys.readouterr().out


def test_demo_without_correlations(tmp_path, capsys):
    assert main(['demo', '--zero-correlations', '--out', str(tmp_path)]) == EXIT_OK
    summary = json.loads((tmp_path / 'summary.json').read_text())
    assert summary['witness_time'] is None
    assert summary['max_abs_d'] <= 1e-10
    assert 'completely positive at every time point' in capsys.readouterr().out


@pytest.mark.slow
def test_selftest_passes(capsys):
    assert main(['selftest']) == EXIT_OK
    out = capsys.readouterr().out
    assert '10/10 criteria passed' in out
    assert '[FAIL]' not in out


@pytest.mark.slow
def test_selftest_fails_with_impossible_tolerance(restore_tolerances, capsys):
    assert main(['--tol', 'eq=1e-30', 'selftest']) == EXIT_FAILED
    assert '[FAIL]' in capsys.readouterr().out


def test_verbose_switches_to_debug(tmp_path, capsys):
    try:
        assert main(['--verbose', 'basis', '--dim', '1', '--out', str(tmp_path / 'b.json')]) == EXIT_OK
        logger_setup.logger.debug("verbose switch check")
        assert "verbose switch check" in capsys.readouterr().err
    finally:
        # reinstall against the real stderr, not the capture that ends with this test
        with contextlib.redirect_stderr(sys.__stderr__):
            logger_setup.configure()
