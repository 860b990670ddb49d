from dataclasses import dataclass
import logging
import numpy as np
import scipy as sp

from .channel import ChannelModel, sample_channel_pool, rate

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class WeightCdf:
    '''
    Empirical CDF of a pair's weight, conditioned on the weight being positive

    Fields:
    - samples: sorted positive weight samples
    - sample_count: number of draws, positive or not
    '''
    samples: np.ndarray
    sample_count: int

    @property
    def n_positive(self) -> int:
        return len(self.samples)

    @property
    def prob_positive(self) -> float:
        return self.n_positive/self.sample_count if self.sample_count else 0.0

    @property
    def degenerate(self) -> bool:
        return self.n_positive == 0

    def positives_at_most(self, x):
        return np.searchsorted(self.samples, x, side='right')

    def __call__(self, x):
        '''
        F(x) = P(W <= x | W > 0)
        '''
        if self.degenerate: return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
        values = self.positives_at_most(x)/self.n_positive
        return float(values) if np.ndim(values) == 0 else values


    def thresholds_at(self, quantiles) -> np.ndarray:
        '''
        Map quantile knots q to weight thresholds: the smallest sample s with F(s) >= q, and 0 for q <= 0

        Inputs:
        - quantiles: descending knots in [0,1], shape [M]

        Outputs:
        - thresholds, shape [M]; all +inf for a degenerate CDF (abstain)
        '''
        quantiles = np.asarray(quantiles, dtype=float)
        if self.degenerate: return np.full(quantiles.shape, np.inf)
        ranks = np.clip(np.ceil(quantiles*self.n_positive).astype(int), 0, self.n_positive)
        return np.where(ranks > 0, self.samples[np.maximum(ranks-1, 0)], 0.0)

    def uniform_thresholds(self, M: int) -> 'ThresholdMap':
        '''
        Thresholds a_m = F^-1((M-m)/M), computed with integer ranks so that map_threshold reproduces map_uniform exactly
        '''
        if self.degenerate: return ThresholdMap(np.full(M, np.inf), None)
        m = np.arange(1, M+1)
        ranks = -(-((M-m)*self.n_positive)//M) # ceil
        thresholds = np.where(ranks > 0, self.samples[np.maximum(ranks-1, 0)], 0.0)
        return ThresholdMap(thresholds, (M-m)/M)

@dataclass(frozen=True)
class ThresholdMap:
    '''
    Descending thresholds a_1 >= ... >= a_M. Weight W maps to mini-slot m iff a_m <= W < a_{m-1} (a_0 = +inf), and to M+1 if W < 0 or W < a_M.

    Fields:
    - thresholds: shape [M] for a single pair, or [N,M] with one row per pair
    - quantiles: the quantile knots the thresholds were derived from, if any
    - objective: the Monte Carlo objective reached by optimize_thresholds, if any
    '''
    thresholds: np.ndarray
    quantiles: np.ndarray = None
    objective: float = None

    def __post_init__(self):
        thresholds = np.asarray(self.thresholds, dtype=float)
        object.__setattr__(self, 'thresholds', thresholds)
        finite = np.where(np.isinf(thresholds), np.nan, thresholds)
        with np.errstate(invalid='ignore'):
            assert not np.any(np.diff(finite, axis=-1) > 0), "thresholds must be nonincreasing"

def map_uniform(W: float, cdf: WeightCdf, M: int) -> int:
    '''
    Uniform mapping: slot m iff F(W) lies in the quantile band [(M-m)/M, (M-m+1)/M)

    Inputs:
    - W: the pair's weight
    - cdf: the pair's conditional weight CDF
    - M: number of mini-slots

    Outputs:
    - mini-slot index in 1..M+1
    '''
    assert M >= 1, f"M must be at least 1, but was {M}"
    if W < 0 or cdf.degenerate: return M+1
    count = int(cdf.positives_at_most(W))
    return max(1, M - (count*M)//cdf.n_positive)

def map_linear(W: float, W_max: float, M: int) -> int:
    '''
    Linear mapping: slot m covers [(M-m)*W_max/M, (M-m+1)*W_max/M); weights at or above W_max take slot 1

    Inputs:
    - W: the pair's weight
    - W_max: agreed weight cap, > 0
    - M: number of mini-slots

    Outputs:
    - mini-slot index in 1..M+1
    '''
    assert W_max > 0, f"W_max must be positive, but was {W_max}"
    assert M >= 1, f"M must be at least 1, but was {M}"
    if W < 0: return M+1
    return max(1, M - int(np.floor(W*M/W_max)))

def map_threshold(W: float, thresholds) -> int:
    '''
    Threshold mapping

    Inputs:
    - W: the pair's weight
    - thresholds: a ThresholdMap over a single pair, or its descending threshold vector

    Outputs:
    - mini-slot index in 1..M+1
    '''
    if isinstance(thresholds, ThresholdMap): thresholds = thresholds.thresholds
    thresholds = np.asarray(thresholds, dtype=float)
    M = len(thresholds)
    if W < 0: return M+1
    return 1 + int(np.sum(thresholds > W))

def estimate_weight_cdfs(channel: ChannelModel, Q, Z: float, P: float, N0: float, samples: int, rng: np.random.Generator) -> list:
    '''
    Estimate every pair's conditional weight CDF from one pool of fresh channel draws

    Inputs:
    - channel: the channel model
    - Q: backlogs, shape [N]
    - Z: virtual queue backlog
    - P, N0: transmit and noise power
    - samples: draws per pair
    - rng: random source

    Outputs:
    - list of N WeightCdf
    '''
    weights = _pool_weights(channel, Q, Z, P, N0, samples, rng)
    return [_cdf_from_column(weights[:, i]) for i in range(weights.shape[1])]

def estimate_weight_cdf(channel: ChannelModel, Q: float, Z: float, P: float, N0: float, samples: int, rng: np.random.Generator, pair: int=0) -> WeightCdf:
    '''
    Estimate one pair's conditional weight CDF F(x) = P(W <= x | W > 0, Q, Z)

    Inputs:
    - channel: the channel model
    - Q: the pair's backlog
    - Z: virtual queue backlog
    - P, N0: transmit and noise power
    - samples: number of draws
    - rng: random source
    - pair: which pair of the model to use

    Outputs:
    - WeightCdf; prob_positive=0 when no draw had a positive weight
    '''
    single = ChannelModel(channel.direct_means[pair:pair+1], channel.interference_means[pair:pair+1], channel.direct_kind, channel.interference_kind)
    return estimate_weight_cdfs(single, [Q], Z, P, N0, samples, rng)[0]

def _pool_weights(channel: ChannelModel, Q, Z: float, P: float, N0: float, samples: int, rng: np.random.Generator) -> np.ndarray:
    h, g = sample_channel_pool(channel, rng, samples)
    return np.asarray(Q, dtype=float)[None, :]*rate(h, P, N0) - Z*P*g

def _cdf_from_column(weights: np.ndarray) -> WeightCdf:
    return WeightCdf(np.sort(weights[weights > 0]), len(weights))

def weight_samples(channel: ChannelModel, Q, Z: float, P: float, N0: float, samples: int, rng: np.random.Generator) -> tuple:
    '''
    Draw joint weight samples of all pairs together with each weight's conditional quantile

    Outputs:
    - weights: shape [S,N]
    - quantiles: F_i(W_i) for positive weights and -1 elsewhere, shape [S,N]
    '''
    weights = _pool_weights(channel, Q, Z, P, N0, samples, rng)
    quantiles = np.full(weights.shape, -1.0)
    for i in range(weights.shape[1]):
        cdf = _cdf_from_column(weights[:, i])
        if cdf.degenerate: continue
        positive = weights[:, i] > 0
        quantiles[positive, i] = cdf(weights[positive, i])
    return weights, quantiles

def threshold_objective(quantile_knots, weights: np.ndarray, quantiles: np.ndarray, tau: float) -> float:
    '''
    Monte Carlo estimate of (1-M*tau)*E[W_winner * 1{unique earliest contender}] for descending quantile knots

    Inputs:
    - quantile_knots: descending knots q_1 >= ... >= q_M
    - weights, quantiles: output of weight_samples
    - tau: mini-slot to slot duration ratio

    Outputs:
    - the objective value
    '''
    knots = np.asarray(quantile_knots, dtype=float)
    M = len(knots)
    ascending = knots[::-1]
    slots = 1 + M - np.searchsorted(ascending, quantiles, side='right')
    slots[quantiles < 0] = M+1
    earliest = slots.min(axis=1)
    unique = np.sum(slots == earliest[:, None], axis=1) == 1
    success = unique & (earliest <= M)
    winners = np.argmin(slots, axis=1)
    values = np.where(success, weights[np.arange(len(weights)), winners], 0.0)
    return float((1 - M*tau)*np.mean(values))

def power_knots(M: int, exponent: float) -> np.ndarray:
    '''
    Quantile knots ((M-m)/M)^exponent, m = 1..M; exponent 1 gives the uniform mapping
    '''
    return ((M - np.arange(1, M+1))/M)**exponent

def optimize_quantiles(weights: np.ndarray, quantiles: np.ndarray, M: int, tau: float, restarts: int, sweeps: int, validation: tuple=None) -> tuple:
    '''
    Coordinate ascent over the quantile knots q_1..q_{M-1} (q_M is fixed at 0). Restart r starts from the power knots
    with exponent 1, 2, 1/2, 4, 1/4, ... When validation samples are given, a knot move is kept only if it improves the
    training objective without lowering the validation objective, and the knots with the best validation objective win,
    so the result never scores below the uniform knots on the validation samples.

    Inputs:
    - weights, quantiles: training samples, output of weight_samples
    - M: number of mini-slots
    - tau: mini-slot to slot duration ratio
    - restarts: number of starting points
    - sweeps: coordinate sweeps per start
    - validation: held-out (weights, quantiles), or None to select on the training samples

    Outputs:
    - best knots, shape [M]
    - objective at the best knots, on the validation samples if given
    '''
    def score(knots) -> float:
        return threshold_objective(knots, *validation, tau) if validation is not None else threshold_objective(knots, weights, quantiles, tau)

    uniform = power_knots(M, 1.0)
    best_knots, best_score = uniform, score(uniform)

    for restart in range(max(1, restarts)):
        exponent = 2.0**(((restart+1)//2)*(-1)**(restart+1))
        knots = power_knots(M, exponent)
        value, held_out = threshold_objective(knots, weights, quantiles, tau), score(knots)

        for sweep in range(sweeps):
            improved = False
            for m in range(M-1):
                lower = knots[m+1]
                upper = knots[m-1] if m > 0 else 1.0
                if upper - lower < 1e-9: continue

                def negative_objective(v, m=m):
                    candidate = knots.copy()
                    candidate[m] = v
                    return -threshold_objective(candidate, weights, quantiles, tau)

                result = sp.optimize.minimize_scalar(negative_objective, bounds=(lower, upper), method='bounded', options={'xatol': 1e-4, 'maxiter': 12})
                if -result.fun <= value: continue
                candidate = knots.copy()
                candidate[m] = result.x
                candidate_held_out = score(candidate) if validation is not None else -result.fun
                if candidate_held_out < held_out: continue
                knots, value, held_out, improved = candidate, -result.fun, candidate_held_out, True
            logger.debug(f"threshold restart {restart} sweep {sweep}: objective {value:.6g}, held out {held_out:.6g}")
            if not improved: break

        if held_out > best_score: best_knots, best_score = knots.copy(), held_out

    return best_knots, best_score

def optimize_thresholds(channel: ChannelModel, Q, Z: float, config, rng: np.random.Generator) -> ThresholdMap:
    '''
    Optimised weight mapping: find quantile knots, shared by all pairs, that maximise the expected weight of a
    successful contention winner, ignoring imperfect scheduling. The knots are fitted on threshold_samples draws
    and checked against as many independent draws.

    Inputs:
    - channel: the channel model
    - Q: backlogs, shape [N]
    - Z: virtual queue backlog
    - config: SimConfig supplying P, N0, M, tau, threshold_samples, threshold_restarts, threshold_sweeps
    - rng: random source

    Outputs:
    - ThresholdMap with per-pair thresholds [N,M], the knots and the validation objective; an all-abstain map when no pair can have a positive weight
    '''
    M = config.M
    weights, quantiles = weight_samples(channel, Q, Z, config.P, config.N0, config.threshold_samples, rng)
    if np.all(quantiles < 0):
        logger.warning("no positive weight samples, returning an all-abstain threshold map")
        return ThresholdMap(np.full((channel.N, M), np.inf), None, 0.0)
    validation = weight_samples(channel, Q, Z, config.P, config.N0, config.threshold_samples, rng)

    if M == 1: knots, objective = np.zeros(1), threshold_objective(np.zeros(1), *validation, config.tau)
    else: knots, objective = optimize_quantiles(weights, quantiles, M, config.tau, config.threshold_restarts, config.threshold_sweeps, validation)

    cdfs = [_cdf_from_column(weights[:, i]) for i in range(channel.N)]
    logger.info(f"optimised {M} mini-slot thresholds, validation objective {objective:.6g}")
    return ThresholdMap(np.stack([cdf.thresholds_at(knots) for cdf in cdfs]), knots, objective)
