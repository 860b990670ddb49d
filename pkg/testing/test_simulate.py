import sys
sys.path.append('src')
import io
import json
import numpy as np
import pandas as pd

import d2dsched
from d2dsched.cli import main

point_mass_path = "./testing/point_mass.config.json"

def _config(**values) -> d2dsched.SimConfig:
    return d2dsched.SimConfig().with_values(**values)

def test_empty_run():
    metrics = d2dsched.run_simulation(_config(N=3, horizon=0))
    assert np.all(metrics.x == 0) and metrics.utility_sum == 0 and metrics.avg_interference == 0, "An empty run should average to zero"
    assert metrics.beta_hat is None and metrics.trace == [] and metrics.horizon == 0, "An empty run has no beta and no trace"

def test_point_mass_run():
    metrics = d2dsched.run_simulation(d2dsched.read_config(point_mass_path))
    assert abs(metrics.x[0] - 1.0) < 0.02, f"Admission should settle at the service rate 1, but x was {metrics.x[0]}"
    assert abs(metrics.served[0] - 1.0) < 0.02, f"The served rate should approach 1, but was {metrics.served[0]}"
    assert metrics.scheduled_fraction > 0.99, f"The single pair should be scheduled in almost every slot, but was in {metrics.scheduled_fraction}"
    assert metrics.beta_hat == 0, "A single pair is always the maximum-weight pair"

def test_determinism():
    config = _config(N=3, horizon=300, scheduler=d2dsched.Schedulers.cads_uniform, cdf_samples=200, trace=True, seed=11)
    first, second = d2dsched.run_simulation(config), d2dsched.run_simulation(config)
    assert d2dsched.write_metrics_json(first) == d2dsched.write_metrics_json(second), "Equal seeds should give identical Metrics"
    assert d2dsched.write_trace_csv(first.trace) == d2dsched.write_trace_csv(second.trace), "Equal seeds should give identical traces"
    assert d2dsched.write_metrics_json(first) != d2dsched.write_metrics_json(d2dsched.run_simulation(config.with_values(seed=12))), "Different seeds should give different Metrics"

def test_conservation_and_interference():
    metrics = d2dsched.run_simulation(_config(N=3, horizon=20000, seed=1))
    d2dsched.assert_metrics_valid(metrics, 10)
    total = metrics.scheduled_fraction + metrics.collision_fraction + metrics.idle_fraction
    assert np.isclose(total, 1.0), f"Slot fractions should add up to 1, but added up to {total}"
    assert metrics.avg_interference <= 1.05, f"Average interference {metrics.avg_interference} should respect gamma=1"
    assert np.all(metrics.served <= metrics.x + 0.05), "Pairs cannot be served more than they admit"

def test_instantaneous_limit():
    metrics = d2dsched.run_simulation(_config(N=3, horizon=500, nu=0.5, trace=True))
    for record in metrics.trace:
        if record['winner'] >= 0: assert record[f"g_{record['winner']+1}"] <= 0.5, f"Slot {record['t']} scheduled a pair above nu"
        elif record['cause'] == d2dsched.Causes.scheduled: assert False, "A scheduled centralized slot must have a winner"

def test_cads_runs():
    config = _config(N=3, horizon=300, scheduler=d2dsched.Schedulers.cads_uniform, cdf_samples=200, trace=True, M=20, tau=1e-3)
    metrics = d2dsched.run_simulation(config)
    for record in metrics.trace:
        if record['winner'] >= 0:
            expected = (1 - 20*1e-3)*record[f"g_{record['winner']+1}"]
            assert np.isclose(record['interference'], expected), f"Slot {record['t']}: a CADS winner transmits only in the data phase"
        else: assert record['interference'] == 0, f"Slot {record['t']}: idle and collided slots cause no interference"
    assert metrics.collision_fraction > 0, "Three pairs on 20 mini-slots should collide sometimes"

    metrics = d2dsched.run_simulation(config.with_values(scheduler=d2dsched.Schedulers.cads_linear, trace=False))
    assert metrics.W_max is not None and metrics.W_max > 0, "Linear mapping should agree on a positive W_max"

    metrics = d2dsched.run_simulation(config.with_values(scheduler=d2dsched.Schedulers.cads_optimal, trace=False, threshold_samples=1000, threshold_restarts=1, threshold_sweeps=1, horizon=100))
    d2dsched.assert_metrics_valid(metrics, config.A_max)
    assert metrics.W_max is None, "Only linear mapping uses W_max"

def test_irds_run():
    metrics = d2dsched.run_simulation(_config(N=4, horizon=2000, scheduler=d2dsched.Schedulers.irds, trace=True))
    d2dsched.assert_metrics_valid(metrics, 10)
    assert metrics.collision_fraction == 0, "IRDS slots never collide"
    assert max(record['transmitters'] for record in metrics.trace) >= 1, "IRDS should transmit at some point"

def test_sweep():
    base = _config(N=2, horizon=200)
    rows = d2dsched.sweep(base, 'V', [10, 400])
    assert [row.value for row in rows] == [10, 400] and all(row.valid for row in rows), "Every V value should give a valid row"
    assert rows[0].metrics.mean_Q < rows[1].metrics.mean_Q, "Queues should grow with V"

    rows = d2dsched.sweep(base, 'M', [20, 20000])
    assert rows[0].valid and not rows[1].valid, "M=20000 with tau=1e-4 should be marked invalid"
    assert "'M'" in rows[1].error, f"The invalid row should name M, but said '{rows[1].error}'"
    assert d2dsched.derive_seed(0, 0) != d2dsched.derive_seed(0, 1), "Sweep rows should use different seeds"

    table = pd.read_csv(io.StringIO(d2dsched.write_sweep_csv(rows)))
    assert len(table) == 2 and list(table['valid']) == [True, False], "The sweep CSV should hold one row per value"

def test_noniid_reduces_to_iid():
    config = _config(N=3, horizon=300, seed=5)
    averaged = d2dsched.run_noniid(config, 1, (2.0, 2.0), (1.0, 1.0))
    assert averaged.to_dict() == d2dsched.run_simulation(config).to_dict(), "Degenerate mean ranges should reproduce the iid run"

    noniid = d2dsched.noniid_config(config, 1)
    assert all(1.2 <= mean <= 2.8 for mean in noniid.direct_means) and all(0.2 <= mean <= 1.8 for mean in noniid.interference_means), "Means should lie in the given ranges"
    assert noniid.seed == 6, "Run r should use seed + r"

def test_cli_bound(capsys):
    assert main(['bound', '--N', '2', '--M', '2', '--tau', '0', '--beta', '0']) == 0, "bound should succeed"
    table = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert len(table) == 1 and abs(table['alpha'][0] - 1/3) < 1e-6, f"alpha of N=2, M=2 should be 0.333333, but was {table['alpha'][0]}"
    assert abs(table['P_1'][0] - 2/3) < 1e-6 and table['P_2'][0] == 0, "The table should hold P_1..P_M"

def test_cli_simulate(capsys, tmp_path):
    assert main(['simulate', '--set', 'horizon=0', '-q']) == 0, "simulate should succeed"
    values = json.loads(capsys.readouterr().out)
    assert values['horizon'] == 0 and values['beta_hat'] is None, f"An empty run should give empty Metrics, but gave {values}"

    outputs = []
    for name in ('first.json', 'second.json'):
        path = str(tmp_path/name)
        assert main(['simulate', '--config', point_mass_path, '--set', 'horizon=500', '--seed', '3', '--out', path, '--trace', str(tmp_path/f"{name}.trace.csv"), '-q']) == 0
        with open(path, 'r') as f: outputs.append(f.read())
    assert outputs[0] == outputs[1], "Identical commands should write identical files"
    assert len(pd.read_csv(tmp_path/"first.json.trace.csv")) == 500, "The trace should hold one row per slot"

def test_cli_sweep(capsys):
    assert main(['sweep', '--parameter', 'V', '--values', '10,50,100,200,400', '--set', 'horizon=50', '--set', 'N=2', '-q']) == 0, "sweep should succeed"
    table = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert len(table) == 5 and list(table['value']) == [10, 50, 100, 200, 400], "The sweep CSV should hold five rows"

def test_cli_errors(capsys):
    assert main(['simulate', '--set', 'M=20000', '-q']) == 1, "An invalid configuration should fail"
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record['error'] == 'AssertionError' and record['subcommand'] == 'simulate' and "'M'" in record['message'], f"Wrong error record {record}"

    assert main(['simulate', '--config', './does_not_exist.json', '-q']) == 1, "A missing configuration file should fail"
