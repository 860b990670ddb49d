from dataclasses import dataclass
from fractions import Fraction
import numpy as np

from .verify import assert_bound_params_valid

@dataclass(frozen=True)
class BoundParams:
    '''
    Fields:
    - N: number of pairs
    - M: number of mini-slots
    - tau: mini-slot to slot duration ratio
    - beta: imperfect-scheduling loss in [0,1]
    '''
    N: int
    M: int
    tau: float = 0.0
    beta: float = 0.0

def p_success_given_slot(N: int, M: int, k: int) -> Fraction:
    '''
    Probability that uniform contention succeeds given that the earliest contender sits in mini-slot k:
    P_k = N(M-k)^(N-1) / ((M-k+1)^N - (M-k)^N), with 0^0 = 1

    Inputs:
    - N: number of pairs
    - M: number of mini-slots
    - k: mini-slot index, 1 <= k <= M

    Outputs:
    - P_k as an exact fraction
    '''
    assert N >= 1 and M >= 1, f"N and M must be at least 1, but were {N} and {M}"
    assert 1 <= k <= M, f"k must lie in 1..M={M}, but was {k}"
    later = M - k
    return Fraction(N*later**(N-1), (later+1)**N - later**N)

def pk_sequence(N: int, M: int) -> list:
    '''
    The exact sequence P_1..P_M
    '''
    return [p_success_given_slot(N, M, k) for k in range(1, M+1)]

def alpha_bound(params: BoundParams, form: str='derivation') -> float:
    '''
    Fraction of the max-weight performance guaranteed to CADS with uniform mapping

    Inputs:
    - params: BoundParams
    - form: 'derivation' gives (1-M*tau)(1-beta)(1/M)*sum_k P_k, 'statement' gives (1-M*tau)(1-beta)(N/M)*sum_k P_k

    Outputs:
    - alpha
    '''
    assert_bound_params_valid(params)
    assert form in ('derivation', 'statement'), f"form must be 'derivation' or 'statement', but was '{form}'"
    scale = Fraction(1, params.M) if form == 'derivation' else Fraction(params.N, params.M)
    return (1 - params.M*params.tau)*(1 - params.beta)*float(scale*sum(pk_sequence(params.N, params.M)))

def check_pk_sequence(N: int, M: int) -> bool:
    '''
    Check exactly whether P_1..P_M is nonincreasing with nonnegative second differences

    Inputs:
    - N: number of pairs
    - M: number of mini-slots

    Outputs:
    - True if the sequence is nonincreasing and convex
    '''
    sequence = pk_sequence(N, M)
    differences = [b - a for a, b in zip(sequence, sequence[1:])]
    nonincreasing = all(difference <= 0 for difference in differences)
    convex = all(b - a >= 0 for a, b in zip(differences, differences[1:]))
    return nonincreasing and convex

def success_probability(N: int, M: int) -> Fraction:
    '''
    Unconditional probability that N contenders, each on a uniform mini-slot, have a unique earliest contender:
    sum_k N(M-k)^(N-1)/M^N
    '''
    assert N >= 1 and M >= 1, f"N and M must be at least 1, but were {N} and {M}"
    return Fraction(sum(N*(M-k)**(N-1) for k in range(1, M+1)), M**N)

def uniform_contention_ratio(N: int, M: int, trials: int, rng: np.random.Generator) -> float:
    '''
    Monte Carlo ratio E[sum_i I_i W_i]/E[W*] of an idealised uniform-mapping contention round with iid
    positive weights, no mini-slot overhead and weights mapped through their exact quantiles

    Inputs:
    - N: number of pairs
    - M: number of mini-slots
    - trials: number of contention rounds
    - rng: random source

    Outputs:
    - the ratio
    '''
    weights = rng.standard_exponential((trials, N))
    quantiles = 1 - np.exp(-weights)
    slots = M - np.floor(quantiles*M).astype(int)
    earliest = slots.min(axis=1)
    unique = np.sum(slots == earliest[:, None], axis=1) == 1
    winners = np.argmin(slots, axis=1)
    achieved = np.where(unique, weights[np.arange(trials), winners], 0.0)
    return float(np.sum(achieved)/np.sum(weights.max(axis=1)))

def drift_constant_C1(R_max: float, A_max: float) -> float:
    '''
    Per-pair drift constant C_1 = R_max^2 + A_max^2
    '''
    return R_max**2 + A_max**2

def drift_constant_B1(N: int, R_max: float, A_max: float, gamma: float, g_max: float) -> float:
    '''
    Drift constant B_1 = (N(R_max^2 + A_max^2) + gamma^2 + N^2 g_max^2)/2 of the centralized control's utility bound

    Inputs:
    - N: number of pairs
    - R_max: largest per-slot rate
    - A_max: admission cap
    - gamma: average interference limit
    - g_max: largest interference power P*g

    Outputs:
    - B_1
    '''
    assert min(N, R_max, A_max, gamma, g_max) >= 0, "all inputs of B_1 must be nonnegative"
    return (N*drift_constant_C1(R_max, A_max) + gamma**2 + N**2*g_max**2)/2
