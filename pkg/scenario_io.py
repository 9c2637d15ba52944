"""Scenario files and report output.

Scenario JSON:
    {label, system_dim, env_dim, hamiltonian: [[ [re, im], … ], …],
     assignment: {env_means: [real…], correlations: [[real…]…]},
     times?: {start, stop, steps}}
"""
import json
import os
from dataclasses import dataclass
from typing import Optional, Sequence, TextIO, Union

import numpy as np
import pandas as pd

import config as cfg
import logger_setup as logger_module
from analysis import MapAnalysisReport
from errors import DynamapError, ScenarioError
from matrix_core import kron, matrix_from_pairs, matrix_to_pairs, pauli_matrices
from reduced_dynamics import InitialAssignment, JointScenario

logger = logger_module.logger


@dataclass(frozen=True)
class TimeGrid:
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if not (np.isfinite(self.start) and np.isfinite(self.stop)):
            raise ScenarioError("start and stop must be finite", 'times')
        if self.steps < 1:
            raise ScenarioError(f"steps must be >= 1, got {self.steps}", 'times.steps')
        if self.stop < self.start:
            raise ScenarioError(f"stop ({self.stop}) must be >= start ({self.start})", 'times.stop')

    def times(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([float(self.start)])
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True, eq=False)
class ScenarioDocument:
    """Everything a scenario file holds."""
    scenario: JointScenario
    assignment: InitialAssignment
    times: Optional[TimeGrid] = None

    def same_as(self, other: 'ScenarioDocument') -> bool:
        """Exact value equality (used for the write/re-read round trip)."""
        a, b = self, other
        return (a.scenario.label == b.scenario.label
                and a.scenario.system_dim == b.scenario.system_dim
                and a.scenario.env_dim == b.scenario.env_dim
                and np.array_equal(a.scenario.hamiltonian, b.scenario.hamiltonian)
                and np.array_equal(a.assignment.env_means, b.assignment.env_means)
                and np.array_equal(a.assignment.correlations, b.assignment.correlations)
                and a.times == b.times)


def _require(data: dict, key: str, where: str = ''):
    if not isinstance(data, dict) or key not in data:
        raise ScenarioError("missing required field", f"{where}{key}")
    return data[key]


def _positive_int(value, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ScenarioError(f"expected a positive integer, got {value!r}", field)
    return value


def _parse_hamiltonian(rows, dim: int) -> np.ndarray:
    if not isinstance(rows, list) or len(rows) != dim:
        raise ScenarioError(f"expected {dim} rows", 'hamiltonian')
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise ScenarioError(f"expected {dim} entries", f'hamiltonian[{i}]')
        for j, entry in enumerate(row):
            if (not isinstance(entry, list) or len(entry) != 2
                    or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)):
                raise ScenarioError(f"expected [re, im], got {entry!r}", f'hamiltonian[{i}][{j}]')
    H = matrix_from_pairs(rows)
    bad = np.argwhere(np.abs(H - H.conj().T) > cfg.config.tol_herm)
    if len(bad):
        i, j = bad[0]
        raise ScenarioError(f"NotHermitian: H[{i}][{j}] != conj(H[{j}][{i}])", f'hamiltonian[{i}][{j}]')
    return H


def parse_scenario(data: dict) -> ScenarioDocument:
    """
    Validate a decoded scenario dict.

    Args:
        data: Decoded JSON object

    Returns:
        ScenarioDocument

    Raises:
        ScenarioError: Naming the first offending field
    """
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")

    label = str(data.get('label', ''))
    N = _positive_int(_require(data, 'system_dim'), 'system_dim')
    M = _positive_int(_require(data, 'env_dim'), 'env_dim')
    H = _parse_hamiltonian(_require(data, 'hamiltonian'), N * M)

    assignment_data = data.get('assignment', {})
    try:
        b = np.asarray(assignment_data.get('env_means', np.zeros(M * M - 1)), dtype=np.float64)
        c = np.asarray(assignment_data.get('correlations', np.zeros((N * N - 1, M * M - 1))), dtype=np.float64)
    except (TypeError, ValueError, AttributeError) as e:
        raise ScenarioError(f"expected real numbers: {str(e)}", 'assignment')
    if b.shape != (M * M - 1,):
        raise ScenarioError(f"expected length {M * M - 1}, got shape {b.shape}", 'assignment.env_means')
    if c.shape != (N * N - 1, M * M - 1) and not (c.size == 0 and (N * N - 1) * (M * M - 1) == 0):
        raise ScenarioError(f"expected shape ({N * N - 1}, {M * M - 1}), got {c.shape}",
                            'assignment.correlations')
    c = c.reshape(N * N - 1, M * M - 1)

    times = None
    if data.get('times') is not None:
        grid = data['times']
        try:
            times = TimeGrid(float(_require(grid, 'start', 'times.')), float(_require(grid, 'stop', 'times.')),
                             _positive_int(_require(grid, 'steps', 'times.'), 'times.steps'))
        except (TypeError, ValueError) as e:
            raise ScenarioError(str(e), 'times')

    try:
        scenario = JointScenario(N, M, H, label)
        assignment = InitialAssignment(b, c)
    except ScenarioError:
        raise
    except (DynamapError, ValueError) as e:
        raise ScenarioError(str(e))
    return ScenarioDocument(scenario, assignment, times)


def load_scenario(path: str) -> ScenarioDocument:
    """
    Read and validate a scenario file.

    Raises:
        ScenarioError: On I/O, JSON syntax (with line/column) or validation failure
    """
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        logger.error(f"Invalid JSON in {path}: {e.msg} at line {e.lineno}, column {e.colno}")
        raise ScenarioError(f"invalid JSON: {e.msg} at line {e.lineno}, column {e.colno}", path)
    except OSError as e:
        logger.error(f"Could not read scenario {path}: {str(e)}")
        raise ScenarioError(f"could not read file: {e.strerror}", path)

    doc = parse_scenario(data)
    logger.info(f"Loaded scenario '{doc.scenario.label}' (N={doc.scenario.system_dim}, M={doc.scenario.env_dim})")
    return doc


def scenario_to_dict(doc: ScenarioDocument) -> dict:
    data = {
        'label': doc.scenario.label,
        'system_dim': doc.scenario.system_dim,
        'env_dim': doc.scenario.env_dim,
        'hamiltonian': matrix_to_pairs(doc.scenario.hamiltonian),
        'assignment': {
            'env_means': [float(x) for x in doc.assignment.env_means],
            'correlations': [[float(x) for x in row] for row in doc.assignment.correlations],
        },
    }
    if doc.times is not None:
        data['times'] = {'start': doc.times.start, 'stop': doc.times.stop, 'steps': doc.times.steps}
    return data


def write_scenario(doc: ScenarioDocument, path: str):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(scenario_to_dict(doc), f, indent=cfg.config.output['json_indent'])
        f.write('\n')
    logger.info(f"Wrote scenario '{doc.scenario.label}' to {path}")


def demo_scenario(zero_correlations: bool = False) -> ScenarioDocument:
    """
    Bundled correlated two-qubit scenario.

    H = J (XX + YY + ZZ) + h_S Z⊗1 + h_R 1⊗Z, with environment mean b_z and a
    system-X / environment-Z correlation c_xz. Parameters come from the `demo`
    config section; the correlated assignment is a valid joint state at the
    maximally mixed system state. The full map first fails CP near t ≈ 0.15 and
    is most negative near t ≈ 1.4 (min Choi eigenvalue ≈ -0.07).
    """
    params = cfg.config.demo
    sx, sy, sz = pauli_matrices()
    one = np.eye(2, dtype=np.complex128)
    J = float(params['coupling'])
    H = (J * (kron(sx, sx) + kron(sy, sy) + kron(sz, sz))
         + float(params['field_system']) * kron(sz, one)
         + float(params['field_env']) * kron(one, sz))

    b = np.zeros(3)
    c = np.zeros((3, 3))
    if not zero_correlations:
        # basis order (σ_x, σ_y, σ_z)
        b[2] = float(params['env_mean_z'])
        c[0, 2] = float(params['correlation_xz'])

    label = params['label'] + ('-product' if zero_correlations else '')
    grid = TimeGrid(float(params['t0']), float(params['t1']), int(params['steps']))
    return ScenarioDocument(JointScenario(2, 2, H, label), InitialAssignment(b, c), grid)


def reports_to_frame(reports: Sequence[MapAnalysisReport]) -> pd.DataFrame:
    return pd.DataFrame([r.to_row() for r in reports])


def write_reports(reports: Sequence[MapAnalysisReport], out: Union[str, TextIO], fmt: str = 'json'):
    """
    Write reports as JSON (list of objects) or CSV (17 significant digits).

    Args:
        reports: Reports ordered by t
        out: File path or open text stream
        fmt: 'json' or 'csv'
    """
    if fmt == 'csv':
        text = reports_to_frame(reports).to_csv(index=False, float_format=cfg.config.output['float_format'])
    elif fmt == 'json':
        text = json.dumps([r.to_dict() for r in reports], indent=cfg.config.output['json_indent']) + '\n'
    else:
        raise ValueError(f"Unknown format '{fmt}'")

    if isinstance(out, str):
        directory = os.path.dirname(out)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(out, 'w') as f:
            f.write(text)
        logger.info(f"Wrote {len(reports)} report(s) to {out}")
    else:
        out.write(text)


def read_reports_csv(path: str) -> pd.DataFrame:
    return pd.read_csv(path, float_precision='round_trip')
