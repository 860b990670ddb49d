import sys
sys.path.append('src')
import numpy as np
import scipy as sp

import d2dsched
from d2dsched import Causes

def _uniform_cdf(n: int=1000) -> d2dsched.WeightCdf:
    return d2dsched.WeightCdf(np.arange(1, n+1)/n, n)

def test_centralized_schedule():
    decision = d2dsched.centralized_schedule([3, 5, -1], [0.2, 0.9, 0.1], 1.0, 0.5)
    assert decision.winner == 0 and decision.scheduled, f"The nu filter should exclude pair 1, leaving pair 0, but got {decision}"

    decision = d2dsched.centralized_schedule([-1, -2], [0.5, 0.5], 1.0, np.inf)
    assert decision.winner is None and decision.cause == Causes.idle_all_negative, f"All-negative weights should idle, but got {decision}"

    decision = d2dsched.centralized_schedule([4, 4], [0.1, 0.1], 1.0, 1.0)
    assert decision.winner == 0, f"Ties should go to the lowest index, but got {decision.winner}"

    decision = d2dsched.centralized_schedule([2, -1], [0.9, 0.1], 1.0, 0.5)
    assert decision.cause == Causes.idle_instantaneous_limit, f"Only the nu filter left the slot idle, but the cause was {decision.cause}"

def test_centralized_matches_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(10000):
        N = rng.integers(1, 6)
        weights = np.round(rng.normal(0, 2, N), 1)
        g = rng.exponential(1, N)
        nu = rng.choice([0.5, 1.0, np.inf])
        decision = d2dsched.centralized_schedule(weights, g, 1.0, nu)

        best, best_value = None, 0.0 # idle
        for i in range(N):
            if g[i] <= nu and weights[i] >= 0 and (best is None or weights[i] > best_value):
                best, best_value = i, weights[i]
        assert decision.winner == best, f"weights {weights}, g {g}, nu {nu}: scheduled {decision.winner}, brute force chose {best}"
        assert np.sum(decision.active) <= 1, "At most one pair may be scheduled"

def test_map_uniform():
    cdf = _uniform_cdf()
    assert d2dsched.map_uniform(0.8, cdf, 4) == 1, "W=0.8 lies in the top quantile band"
    assert d2dsched.map_uniform(0.3, cdf, 4) == 3, "W=0.3 lies in the band [0.25,0.5)"
    assert d2dsched.map_uniform(-0.1, cdf, 4) == 5, "Negative weights should abstain"
    assert d2dsched.map_uniform(0.5, d2dsched.WeightCdf(np.array([]), 100), 4) == 5, "A degenerate CDF should abstain"

def test_map_linear():
    assert d2dsched.map_linear(9, 10, 5) == 1, "W=9 lies in [8,10)"
    assert d2dsched.map_linear(7, 10, 5) == 2, "W=7 lies in [6,8)"
    assert d2dsched.map_linear(12, 10, 5) == 1, "Weights above W_max should take slot 1"
    assert d2dsched.map_linear(0, 10, 5) == 5, "W=0 lies in the lowest band"
    assert d2dsched.map_linear(-1, 10, 5) == 6, "Negative weights should abstain"

def test_map_threshold():
    assert d2dsched.map_threshold(1.5, [2, 1, 0]) == 2, "W=1.5 lies in [1,2)"
    assert d2dsched.map_threshold(5, [2, 1, 0]) == 1, "The top band is unbounded"
    assert d2dsched.map_threshold(-1, [2, 1, 0]) == 4, "Negative weights should abstain"
    assert d2dsched.map_threshold(0, d2dsched.ThresholdMap(np.array([2.0, 1.0, 0.0]))) == 3, "W=0 lies in [0,1)"
    try: d2dsched.ThresholdMap(np.array([1.0, 2.0]))
    except AssertionError: pass
    else: assert False, "Increasing thresholds should be rejected"

def test_uniform_thresholds_reproduce_map_uniform():
    rng = np.random.default_rng(1)
    samples = rng.exponential(3, 997)
    cdf = d2dsched.WeightCdf(np.sort(samples), 1200)
    for M in (1, 4, 10, 37):
        thresholds = cdf.uniform_thresholds(M)
        for W in np.concatenate([samples[:200], rng.exponential(3, 200), [0.0, -1.0, 100.0]]):
            assert d2dsched.map_threshold(W, thresholds) == d2dsched.map_uniform(W, cdf, M), f"M={M}, W={W}: threshold and uniform mapping disagree"

def test_map_uniform_is_uniform():
    rng = np.random.default_rng(2)
    model = d2dsched.ChannelModel.symmetric(1)
    cdf = d2dsched.estimate_weight_cdf(model, 1.0, 0.5, 1.0, 1.0, 1000000, rng)
    weights, _ = d2dsched.weight_samples(model, [1.0], 0.5, 1.0, 1.0, 1000000, rng)
    positive = weights[weights[:, 0] > 0, 0]
    for M in (10, 200):
        slots = np.array([d2dsched.map_uniform(w, cdf, M) for w in positive])
        counts = np.bincount(slots, minlength=M+2)[1:M+1]
        assert counts.sum() == len(positive), f"M={M}: every positive weight should contend"
        p = 1/M
        standard_error = np.sqrt(p*(1-p)*(1/len(positive) + 1/cdf.n_positive))
        deviations = np.abs(counts/len(positive) - p)/standard_error
        assert np.all(deviations <= 5), f"M={M}: slot frequencies deviate from {p} by up to {deviations.max():.2f} standard errors"
        statistic = np.sum((counts - len(positive)*p)**2/(len(positive)*p))/(1 + len(positive)/cdf.n_positive)
        assert statistic <= sp.stats.chi2.ppf(0.999, M-1), f"M={M}: the chi-square statistic {statistic:.1f} rejects uniform slot frequencies"

def test_estimate_weight_cdf():
    model = d2dsched.ChannelModel.symmetric(1)
    cdf = d2dsched.estimate_weight_cdf(model, 1.0, 0.0, 1.0, 1.0, 100000, np.random.default_rng(3))
    assert cdf.prob_positive == 1.0, f"Without interference every weight is positive, but prob_positive was {cdf.prob_positive}"
    statistic = sp.stats.kstest(cdf.samples, lambda r: 1 - np.exp(-(np.exp(r) - 1)/2)).statistic
    assert statistic < 0.01, f"The weight CDF should match the rate CDF, but the Kolmogorov distance was {statistic}"

    cdf = d2dsched.estimate_weight_cdf(model, 0.0, 2.0, 1.0, 1.0, 1000, np.random.default_rng(4))
    assert cdf.degenerate and cdf.prob_positive == 0, "Q=0 and Z>0 should give a degenerate CDF"
    assert np.all(np.isinf(cdf.thresholds_at([0.5, 0.0]))), "A degenerate CDF should map to abstaining thresholds"

def test_cads_contend():
    decision = d2dsched.cads_contend([3, 1, 1, 2], 5)
    assert decision.cause == Causes.idle_collision and decision.winner is None and not np.any(decision.active), f"Pairs 1 and 2 collide, but got {decision}"
    decision = d2dsched.cads_contend([3, 2, 4], 5, 0.01)
    assert decision.winner == 1 and decision.scheduled, f"Pair 1 holds the unique earliest slot, but got {decision}"
    assert np.isclose(decision.effective_fraction, 0.95), f"The effective fraction should be 1-M*tau, but was {decision.effective_fraction}"
    decision = d2dsched.cads_contend([6, 6], 5)
    assert decision.cause == Causes.idle_no_contender, f"All pairs abstained, but got {decision}"

    rng = np.random.default_rng(5)
    for _ in range(200):
        slots = rng.integers(1, 8, 5)
        permutation = rng.permutation(5)
        decision, permuted = d2dsched.cads_contend(slots, 6), d2dsched.cads_contend(slots[permutation], 6)
        assert decision.cause == permuted.cause, "Permuting pairs should not change the outcome"
        if decision.winner is not None: assert permutation[permuted.winner] == decision.winner, "Permuting pairs should permute the winner"

def test_irds_step():
    rng = np.random.default_rng(6)
    active, state = d2dsched.irds_step(d2dsched.IrdsState.empty(3), np.zeros(3), rng, a=[1, 0, 0], p=[1, 0, 0])
    assert list(active) == [True, False, False], f"Pair 0 meets all three conditions, but got {active}"
    assert list(state.prev_decision) == [True, False, False], "The new state should hold the decisions"

    active, _ = d2dsched.irds_step(d2dsched.IrdsState(np.array([False, True, False])), np.zeros(3), rng, a=[1, 0, 0], p=[1, 1, 1])
    assert list(active) == [False, True, False], f"Pair 0 fails Condition 2, pair 1 keeps transmitting, but got {active}"

    active, _ = d2dsched.irds_step(d2dsched.IrdsState(np.array([True, True, False])), np.zeros(3), rng, a=[0, 1, 1], p=[0, 0, 0])
    assert not np.any(active), "Condition 3 should gate every case"

def test_irds_transmission_probability():
    rng = np.random.default_rng(7)
    W = 0.5
    transmissions = [d2dsched.irds_step(d2dsched.IrdsState.empty(1), [W], rng)[0][0] for _ in range(20000)]
    expected = np.exp(W)/(np.exp(W) + 1)
    assert abs(np.mean(transmissions) - expected) < 0.015, f"A lone contender should transmit with probability {expected}, but did {np.mean(transmissions)}"

def test_estimate_beta():
    weights = np.array([1.0, 2.0, 3.0])
    assert d2dsched.estimate_beta(weights, weights) == 0, "A perfect scheduler has no loss"
    assert d2dsched.estimate_beta(weights/2, weights) == 0.5, "Half the maximum weight is a loss of 0.5"
    assert d2dsched.estimate_beta(weights, weights, [False, False, False]) is None, "Without successes beta is undefined"
    assert d2dsched.estimate_beta([1.0, 0.0], [1.0, 5.0], [True, False]) == 0, "Failed slots should not count"

def test_threshold_objective_single_pair():
    rng = np.random.default_rng(8)
    model = d2dsched.ChannelModel.symmetric(1)
    weights, quantiles = d2dsched.weight_samples(model, [1.0], 0.5, 1.0, 1.0, 5000, rng)
    expected = (1 - 8*1e-3)*np.mean(np.where(weights[:, 0] > 0, weights[:, 0], 0.0))
    for _ in range(5):
        knots = np.append(np.sort(rng.uniform(size=7))[::-1], 0.0)
        objective = d2dsched.threshold_objective(knots, weights, quantiles, 1e-3)
        assert np.isclose(objective, expected), f"A single pair never collides, so the objective should be {expected}, but was {objective}"

def test_optimize_thresholds():
    rng = np.random.default_rng(9)
    model = d2dsched.ChannelModel.symmetric(5)
    weights, quantiles = d2dsched.weight_samples(model, np.full(5, 20.0), 5.0, 1.0, 1.0, 4000, rng)
    uniform = d2dsched.power_knots(10, 1.0)
    assert np.allclose(uniform, (10 - np.arange(1, 11))/10), "Exponent 1 should give the uniform knots"
    knots, objective = d2dsched.optimize_quantiles(weights, quantiles, 10, 1e-4, 2, 1)
    assert objective >= d2dsched.threshold_objective(uniform, weights, quantiles, 1e-4), "The optimised knots should not be worse than the uniform knots"
    assert knots[-1] == 0 and np.all(np.diff(knots) <= 0), f"Knots should descend to 0, but were {knots}"

    config = d2dsched.SimConfig(N=3, M=1, threshold_samples=1000)
    thresholds = d2dsched.optimize_thresholds(d2dsched.ChannelModel.symmetric(3), np.ones(3), 0.0, config, rng)
    assert np.all(thresholds.quantiles == 0) and np.all(thresholds.thresholds == 0), "With M=1 every positive weight should contend"

    thresholds = d2dsched.optimize_thresholds(d2dsched.ChannelModel.symmetric(3), np.zeros(3), 1.0, config, rng)
    assert np.all(np.isinf(thresholds.thresholds)), "Without positive weights every pair should abstain"

def test_optimized_thresholds_hold_out_of_sample():
    rng = np.random.default_rng(12)
    model = d2dsched.ChannelModel.symmetric(10)
    Q = np.full(10, 10.0)
    training = d2dsched.weight_samples(model, Q, 0.0, 1.0, 1.0, 5000, rng)
    validation = d2dsched.weight_samples(model, Q, 0.0, 1.0, 1.0, 5000, rng)
    uniform = d2dsched.power_knots(200, 1.0)
    knots, objective = d2dsched.optimize_quantiles(*training, 200, 1e-4, 1, 1, validation)
    assert objective >= d2dsched.threshold_objective(uniform, *validation, 1e-4), "The selected knots should not score below uniform on the validation draws"
    assert np.isclose(objective, d2dsched.threshold_objective(knots, *validation, 1e-4)), "The reported objective should be the validation objective"

    fresh = d2dsched.weight_samples(model, Q, 0.0, 1.0, 1.0, 50000, rng)
    optimised, baseline = d2dsched.threshold_objective(knots, *fresh, 1e-4), d2dsched.threshold_objective(uniform, *fresh, 1e-4)
    assert optimised >= 0.995*baseline, f"On fresh draws the optimised knots scored {optimised}, below the uniform knots' {baseline}"

    config = d2dsched.SimConfig(N=10, threshold_samples=2000, threshold_restarts=1, threshold_sweeps=1)
    thresholds = d2dsched.optimize_thresholds(model, Q, 0.0, config, rng)
    assert thresholds.thresholds.shape == (10, 200) and thresholds.objective > 0, "Optimised thresholds should cover every pair and mini-slot"

def test_make_scheduler():
    for name, kind in ((d2dsched.Schedulers.centralized, d2dsched.CentralizedScheduler), (d2dsched.Schedulers.cads_uniform, d2dsched.CadsScheduler),
                       (d2dsched.Schedulers.cads_linear, d2dsched.CadsScheduler), (d2dsched.Schedulers.cads_optimal, d2dsched.CadsScheduler),
                       (d2dsched.Schedulers.irds, d2dsched.IrdsScheduler)):
        config = d2dsched.SimConfig(N=2, scheduler=name)
        scheduler = d2dsched.make_scheduler(config, d2dsched.channel_model(config))
        assert isinstance(scheduler, kind) and scheduler.name == name, f"'{name}' should build a {kind.__name__}"

    config = d2dsched.SimConfig(N=2, scheduler=d2dsched.Schedulers.cads_linear, cdf_samples=5000)
    scheduler = d2dsched.make_scheduler(config, d2dsched.channel_model(config))
    W_max = scheduler.estimate_W_max(np.random.default_rng(10))
    assert 200 < W_max < 200*np.log1p(2*np.log(100)) + 100, f"W_max should be near the 99th percentile of V*R, but was {W_max}"
