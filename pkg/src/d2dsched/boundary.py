from dataclasses import dataclass
from concurrent.futures import ProcessPoolExecutor
import logging
import math
import numpy as np
from tqdm import tqdm

from .channel import ChannelModel, sample_channel_pool, rate
from .verify import assert_multipliers_valid

logger = logging.getLogger(__name__)

@dataclass
class Multipliers:
    '''
    Fields:
    - lam: multipliers of the rate constraints of the pairs j != i, shape [N-1]
    - mu: multiplier of the average interference constraint
    '''
    lam: np.ndarray
    mu: float = 0.0

    def __post_init__(self):
        self.lam = np.asarray(self.lam, dtype=float).reshape(-1)

    @classmethod
    def initial(cls, N: int) -> 'Multipliers':
        return cls(np.ones(N-1), 0.0)

    def coefficients(self, i: int) -> np.ndarray:
        '''
        Rate coefficients of all N pairs, 1 for the target pair i
        '''
        return np.insert(self.lam, i, 1.0)

@dataclass
class BoundaryPoint:
    '''
    Fields:
    - rates: achieved average rates E[I_j R_j] of all pairs
    - interference: achieved average interference E[sum_j P g_j I_j]
    - multipliers: the final multipliers
    - targets: alpha_j of the pairs j != i
    - gamma: the average interference limit
    - pair: the target pair i
    - iterations: dual iterations used
    - converged: whether the complementary slackness residuals fell below the tolerance
    - feasible: False when the targets cannot be met
    '''
    rates: np.ndarray
    interference: float
    multipliers: Multipliers
    targets: np.ndarray
    gamma: float
    pair: int = 0
    iterations: int = 0
    converged: bool = False
    feasible: bool = True

    def kkt_residuals(self) -> tuple:
        '''
        Complementary slackness residuals lambda_j*(E[I_j R_j]-alpha_j) and mu*(gamma-E[sum P g I])
        '''
        others = np.delete(self.rates, self.pair)
        rate_residuals = self.multipliers.lam*(others - self.targets)
        interference_residual = 0.0 if math.isinf(self.gamma) else self.multipliers.mu*(self.gamma - self.interference)
        return rate_residuals, interference_residual

def dual_schedule(h, g, multipliers: Multipliers, i: int, P: float=1.0, nu: float=math.inf, N0: float=1.0, rates=None) -> np.ndarray:
    '''
    Optimal per-state decision for fixed multipliers: schedule the largest W among pairs with W >= 0 and P*g <= nu,
    where W_i = R_i - mu*P*g_i and W_j = lambda_j*R_j - mu*P*g_j

    Inputs:
    - h, g: gains of one state, shape [N], or of many states, shape [S,N]
    - multipliers: nonnegative Multipliers
    - i: the target pair
    - P, N0: transmit and noise power
    - nu: instantaneous interference limit
    - rates: precomputed rates R, replacing rate(h)

    Outputs:
    - boolean indicators with the shape of h; at most one True per state, ties to the lowest index
    '''
    g = np.asarray(g, dtype=float)
    assert_multipliers_valid(multipliers, g.shape[-1])
    R = rate(h, P, N0) if rates is None else np.asarray(rates, dtype=float)
    weights = multipliers.coefficients(i)*R - multipliers.mu*P*g
    feasible = (weights >= 0) & (P*g <= nu)
    winners = np.argmax(np.where(feasible, weights, -np.inf), axis=-1)
    indicators = np.zeros(g.shape, dtype=bool)
    np.put_along_axis(indicators, np.expand_dims(winners, -1), np.expand_dims(feasible.any(axis=-1), -1), axis=-1)
    return indicators

def solve_boundary_point(model: ChannelModel, i: int, alpha_targets, gamma: float, nu: float=math.inf, P: float=1.0, N0: float=1.0,
                         mc_samples: int=100000, tol: float=1e-3, seed: int=0, pool: tuple=None, max_iterations: int=10000,
                         step: float=1.0, lambda_cap: float=1e3, initial: Multipliers=None) -> BoundaryPoint:
    '''
    Maximise pair i's average rate subject to E[I_j R_j] >= alpha_j for j != i and the interference limits.
    For fixed multipliers the optimal policy is the per-state argmax of dual_schedule; the multipliers follow a
    projected subgradient iteration with steps s_0/sqrt(k), each constraint's gap normalised by its own scale.
    Expectations are taken over one fixed pool of channel draws.

    Inputs:
    - model: the channel model
    - i: the target pair
    - alpha_targets: rate targets of the pairs j != i, shape [N-1], or a scalar used for all of them
    - gamma: average interference limit (inf for none)
    - nu: instantaneous interference limit
    - P, N0: transmit and noise power
    - mc_samples: size of the channel pool the expectations are taken over
    - tol: relative tolerance of the constraint gaps and complementary slackness residuals
    - seed: seed of the channel pool
    - pool: an explicit (h, g) pool, replacing the seeded one
    - max_iterations: dual iteration limit
    - step: initial step size s_0
    - lambda_cap: multiplier size beyond which the targets are declared infeasible
    - initial: starting multipliers

    Outputs:
    - BoundaryPoint; feasible=False only when the targets are proven infeasible on the pool, converged=False when
      the iteration limit was reached first
    '''
    N = model.N
    assert 0 <= i < N, f"target pair must lie in 0..{N-1}, but was {i}"
    assert gamma >= 0, f"gamma must be at least 0, but was {gamma}"
    h, g = sample_channel_pool(model, np.random.default_rng(seed), mc_samples) if pool is None else pool
    R = rate(h, P, N0)
    powers = P*np.asarray(g, dtype=float)
    others = np.delete(np.arange(N), i)
    targets = np.broadcast_to(np.asarray(alpha_targets, dtype=float), (N-1,)).copy()
    assert np.all(targets >= 0), "rate targets must be nonnegative"

    reported_gamma = gamma
    if gamma == 0: nu, gamma = 0.0, math.inf # a zero average allows no state with P*g > 0 at all
    constrained = not math.isinf(gamma)

    multipliers = Multipliers(initial.lam.copy(), initial.mu if constrained else 0.0) if initial is not None else Multipliers.initial(N)
    mean_rate = float(np.mean(R))
    rate_tolerance = tol*np.maximum(targets, mean_rate)
    interference_tolerance = tol*max(gamma if constrained else 0.0, float(np.mean(powers)), 1e-12)
    slackness_tolerance = tol*mean_rate

    single_pair_rates = np.mean(R*(powers <= nu), axis=0)
    if np.any(targets > single_pair_rates[others] + rate_tolerance):
        logger.warning(f"rate targets {targets} exceed the single-pair maxima {single_pair_rates[others]}")
        return _point(R, powers, dual_schedule(h, g, multipliers, i, P, nu, N0, R), multipliers, targets, reported_gamma, i, 0, False, False)

    # gaps are clipped to [-1, 1] in their own units; mu moves in rate-per-interference units
    rate_scale = np.maximum(single_pair_rates[others], 1e-12)
    interference_scale = max(min(gamma, float(np.mean(powers))), 1e-12) if constrained else 1.0
    mu_scale = mean_rate/interference_scale

    for iteration in range(1, max_iterations+1):
        indicators = dual_schedule(h, g, multipliers, i, P, nu, N0, R)
        achieved = np.mean(indicators*R, axis=0)
        interference = float(np.mean(np.sum(indicators*powers, axis=1)))
        rate_gaps = achieved[others] - targets
        interference_gap = interference - gamma if constrained else -math.inf

        rates_met = np.all((rate_gaps >= -rate_tolerance) & ((rate_gaps <= rate_tolerance) | (multipliers.lam*rate_gaps <= slackness_tolerance)))
        interference_met = not constrained or (interference_gap <= interference_tolerance and (interference_gap >= -interference_tolerance or -multipliers.mu*interference_gap <= slackness_tolerance))
        if rates_met and interference_met:
            logger.debug(f"boundary point converged after {iteration} iterations")
            return _point(R, powers, indicators, multipliers, targets, reported_gamma, i, iteration, True, True)

        if _dual_bound(R, powers, nu, multipliers, others, targets, gamma if constrained else None) < -_dual_margin(multipliers, rate_tolerance, interference_tolerance if constrained else 0.0):
            logger.warning(f"rate targets {targets} are infeasible under gamma={reported_gamma} (dual bound below zero after {iteration} iterations)")
            return _point(R, powers, indicators, multipliers, targets, reported_gamma, i, iteration, False, False)

        step_size = step/np.sqrt(iteration)
        multipliers.lam = np.maximum(multipliers.lam - step_size*np.clip(rate_gaps/rate_scale, -1.0, 1.0), 0.0)
        if constrained: multipliers.mu = max(multipliers.mu + step_size*mu_scale*float(np.clip(interference_gap/interference_scale, -1.0, 1.0)), 0.0)
        if iteration % 100 == 0: logger.debug(f"iteration {iteration}: rate gaps {rate_gaps}, interference gap {interference_gap:.3g}")

        if np.any(multipliers.lam > lambda_cap):
            logger.warning(f"multipliers exceeded {lambda_cap}, rate targets {targets} are infeasible")
            return _point(R, powers, indicators, multipliers, targets, reported_gamma, i, iteration, False, False)

    logger.warning(f"boundary point for targets {targets} did not converge in {max_iterations} iterations")
    return _point(R, powers, dual_schedule(h, g, multipliers, i, P, nu, N0, R), multipliers, targets, reported_gamma, i, max_iterations, False, True)

def _dual_bound(R, powers, nu, multipliers, others, targets, gamma) -> float:
    '''
    Dual value of the feasibility problem at the given multipliers: every policy meeting the targets and gamma
    on the pool satisfies E[max(0, max_j lambda_j R_j - mu P g_j)] - sum_j lambda_j alpha_j + mu gamma >= 0,
    where j ranges over the pairs with targets and P g_j <= nu. A negative value proves the targets infeasible.
    '''
    weights = multipliers.lam*R[:, others] - multipliers.mu*powers[:, others]
    weights = np.where(powers[:, others] <= nu, weights, 0.0)
    value = float(np.mean(np.maximum(np.max(weights, axis=1), 0.0))) - float(np.dot(multipliers.lam, targets))
    return value + multipliers.mu*gamma if gamma is not None else value

def _dual_margin(multipliers, rate_tolerance, interference_tolerance) -> float:
    return float(np.dot(multipliers.lam, rate_tolerance)) + multipliers.mu*interference_tolerance

def _point(R, interference_powers, indicators, multipliers, targets, gamma, i, iterations, converged, feasible) -> BoundaryPoint:
    return BoundaryPoint(
        rates=np.mean(indicators*R, axis=0),
        interference=float(np.mean(np.sum(indicators*interference_powers, axis=1))),
        multipliers=Multipliers(multipliers.lam.copy(), multipliers.mu),
        targets=targets,
        gamma=gamma,
        pair=i,
        iterations=iterations,
        converged=converged,
        feasible=feasible
    )

def solve_unconstrained_point(model: ChannelModel, i: int, alpha_targets, **kwargs) -> BoundaryPoint:
    '''
    Boundary point of the region without interference constraints (mu fixed at 0, nu = inf)
    '''
    kwargs.pop('gamma', None)
    kwargs.pop('nu', None)
    return solve_boundary_point(model, i, alpha_targets, math.inf, math.inf, **kwargs)

def _trace_gamma(arguments: tuple) -> list:
    model, i, alpha_grid, gamma, kwargs = arguments
    points = []
    previous = None
    for alpha in alpha_grid:
        point = solve_boundary_point(model, i, alpha, gamma, initial=previous, **kwargs)
        if point.feasible: previous = point.multipliers
        else: logger.warning(f"gamma={gamma}, targets={alpha}: infeasible, marked and skipped")
        points.append(point)
    return points

def trace_region(model: ChannelModel, alpha_grid, gammas, i: int=0, jobs: int=1, verbose: bool=False, **kwargs) -> list:
    '''
    Trace boundary curves: one BoundaryPoint per grid value per gamma. All curves share the same channel pool.

    Inputs:
    - model: the channel model
    - alpha_grid: sequence of rate targets (scalars or vectors of length N-1)
    - gammas: average interference limits to trace
    - i: the target pair
    - jobs: number of worker processes, one gamma per job
    - verbose: if True, show a progress bar
    - kwargs: forwarded to solve_boundary_point (nu, P, N0, mc_samples, tol, seed, ...)

    Outputs:
    - list of BoundaryPoint, ordered by gamma then grid value; infeasible values carry feasible=False
    '''
    alpha_grid, gammas = list(alpha_grid), list(gammas)
    assert len(alpha_grid) > 0, "alpha_grid must not be empty"
    assert len(gammas) > 0, "gammas must not be empty"
    logger.info(f"tracing {len(alpha_grid)} boundary points for each of {len(gammas)} gamma values")
    arguments = [(model, i, alpha_grid, gamma, kwargs) for gamma in gammas]

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            curves = executor.map(_trace_gamma, arguments)
            if verbose: curves = tqdm(curves, total=len(arguments), desc="boundary curves")
            curves = list(curves)
    else:
        if verbose: arguments = tqdm(arguments, desc="boundary curves")
        curves = [_trace_gamma(argument) for argument in arguments]

    return [point for curve in curves for point in curve]
