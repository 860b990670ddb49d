import sys
import json
import numpy as np
import pandas as pd

from .keys import Keys

FLOAT_FORMAT = '%.9g'

def _emit(text: str, path: str=None) -> str:
    '''
    Every writer returns the emitted text and also writes it to path when one is given. CSV floats use 9 significant digits.
    '''
    if path is not None:
        with open(path, 'w', newline='') as f: f.write(text)
    return text

def _csv(frame: pd.DataFrame, path: str=None) -> str:
    return _emit(frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n'), path)

def _flatten(values: dict) -> dict:
    flat = {}
    for key, value in values.items():
        if isinstance(value, list | tuple | np.ndarray): flat.update({f"{key}_{i+1}": v for i, v in enumerate(value)})
        else: flat[key] = value
    return flat

def metrics_record(metrics) -> dict:
    '''
    Flat record of a Metrics, with per-pair vectors spread over columns x_1..x_N and so on
    '''
    return _flatten(metrics.to_dict())

def write_metrics_json(metrics, path: str=None) -> str:
    '''
    Inputs:
    - metrics: the Metrics to write
    - path: output file, or None to only return the text

    Outputs:
    - the JSON text, keys sorted
    '''
    return _emit(json.dumps(metrics.to_dict(), indent=2, sort_keys=True) + '\n', path)

def write_metrics_csv(metrics, path: str=None) -> str:
    return _csv(pd.DataFrame([metrics_record(metrics)]), path)

def write_sweep_csv(rows: list, path: str=None) -> str:
    '''
    One CSV row per swept value, with columns parameter, value, valid, error and the flattened Metrics

    Inputs:
    - rows: list of SweepRow
    - path: output file, or None to only return the text

    Outputs:
    - the CSV text
    '''
    records = []
    for row in rows:
        record = {Keys.parameter: row.parameter, Keys.value: row.value, Keys.valid: row.valid, Keys.error: row.error or ''}
        if row.valid: record.update(metrics_record(row.metrics))
        records.append(record)
    return _csv(pd.DataFrame(records), path)

def boundary_record(point) -> dict:
    '''
    Flat record of a BoundaryPoint; targets and multipliers are numbered by the pair they belong to
    '''
    N = len(point.rates)
    others = [j for j in range(N) if j != point.pair]
    record = {Keys.gamma: point.gamma, Keys.pair: point.pair+1, Keys.feasible: point.feasible, Keys.converged: point.converged, Keys.iterations: point.iterations}
    record.update({f"alpha_{j+1}": float(target) for j, target in zip(others, point.targets)})
    record.update({f"rate_{j+1}": float(point.rates[j]) for j in range(N)})
    record[Keys.interference] = point.interference
    record.update({f"lambda_{j+1}": float(lam) for j, lam in zip(others, point.multipliers.lam)})
    record[Keys.mu] = point.multipliers.mu
    return record

def write_boundary_csv(points: list, path: str=None) -> str:
    '''
    Boundary curves, one row per BoundaryPoint

    Inputs:
    - points: list of BoundaryPoint
    - path: output file, or None to only return the text

    Outputs:
    - the CSV text
    '''
    return _csv(pd.DataFrame([boundary_record(point) for point in points]), path)

def write_bound_csv(records: list, path: str=None) -> str:
    '''
    Bound table: N, M, tau, beta, form, alpha, success probability and P_1..P_M per row

    Inputs:
    - records: list of dicts as built by the bound subcommand
    - path: output file, or None to only return the text

    Outputs:
    - the CSV text
    '''
    return _csv(pd.DataFrame(records), path)

def write_trace_csv(trace: list, path: str=None) -> str:
    '''
    Per-slot trace with columns t, h_i, g_i, A_i, winner, transmitters, cause, Q_i, Z, interference
    '''
    return _csv(pd.DataFrame(trace), path)

def write_json(values, path: str=None) -> str:
    return _emit(json.dumps(values, indent=2, sort_keys=True) + '\n', path)

def print_text(text: str):
    sys.stdout.write(text)
