from dataclasses import dataclass, field
import numpy as np
import scipy as sp

from .keys import Causes

@dataclass(frozen=True)
class ScheduleDecision:
    '''
    Outcome of one slot's scheduling

    Fields:
    - active: indicator I_i(t) per pair, shape [N]
    - cause: one of the Causes
    - winner: the single scheduled pair, or None (also None when IRDS schedules several pairs)
    - contention_slots: mini-slot chosen by every pair (CADS only)
    - effective_fraction: fraction of the slot usable for data
    '''
    active: np.ndarray
    cause: str
    winner: int = None
    contention_slots: np.ndarray = None
    effective_fraction: float = 1.0

    @property
    def scheduled(self) -> bool:
        return self.cause == Causes.scheduled

    @classmethod
    def single(cls, N: int, winner: int, cause: str, contention_slots: np.ndarray=None, effective_fraction: float=1.0) -> 'ScheduleDecision':
        active = np.zeros(N, dtype=bool)
        if winner is not None: active[winner] = True
        return cls(active, cause, winner, contention_slots, effective_fraction)

@dataclass
class IrdsState:
    '''
    Last slot's IRDS decisions I_i(t-1)
    '''
    prev_decision: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))

    @classmethod
    def empty(cls, N: int) -> 'IrdsState':
        return cls(np.zeros(N, dtype=bool))

def centralized_schedule(weights, g, P: float, nu: float) -> ScheduleDecision:
    '''
    Max-weight scheduling: activate the highest nonnegative weight among pairs meeting the instantaneous interference limit

    Inputs:
    - weights: W_i(t), shape [N]
    - g: interference gains, shape [N]
    - P: transmit power
    - nu: instantaneous interference limit (may be inf)

    Outputs:
    - ScheduleDecision; ties go to the lowest index
    '''
    weights, g = np.asarray(weights, dtype=float), np.asarray(g, dtype=float)
    assert weights.shape == g.shape, f"weights and g must have equal shapes, but had {weights.shape} and {g.shape}"
    feasible = (weights >= 0) & (P*g <= nu)
    if not np.any(feasible):
        cause = Causes.idle_all_negative if np.all(weights < 0) else Causes.idle_instantaneous_limit
        return ScheduleDecision.single(len(weights), None, cause)
    winner = int(np.argmax(np.where(feasible, weights, -np.inf)))
    return ScheduleDecision.single(len(weights), winner, Causes.scheduled)

def cads_contend(slots, M: int, tau: float=0.0) -> ScheduleDecision:
    '''
    Resolve a CADS contention phase: the unique earliest contender wins, a shared earliest mini-slot is a collision and the slot stays idle

    Inputs:
    - slots: chosen mini-slot per pair in 1..M+1, shape [N]
    - M: number of mini-slots
    - tau: mini-slot to slot duration ratio

    Outputs:
    - ScheduleDecision with effective_fraction 1-M*tau
    '''
    slots = np.asarray(slots, dtype=int)
    fraction = 1 - M*tau
    contending = slots <= M
    if not np.any(contending): return ScheduleDecision.single(len(slots), None, Causes.idle_no_contender, slots, fraction)
    earliest = slots[contending].min()
    first = np.flatnonzero(slots == earliest)
    if len(first) > 1: return ScheduleDecision.single(len(slots), None, Causes.idle_collision, slots, fraction)
    return ScheduleDecision.single(len(slots), int(first[0]), Causes.scheduled, slots, fraction)

def irds_step(state: IrdsState, weights, rng: np.random.Generator, a=None, p=None) -> tuple:
    '''
    One scheduling phase of the interference regulated distributed scheduler (IRDS) on a fully connected pair graph

    Inputs:
    - state: previous decisions
    - weights: W_i(t), shape [N]
    - rng: random source; a_i ~ Bernoulli(1/N) are drawn first, then p_i ~ Bernoulli(e^W/(e^W+1))
    - a, p: optional fixed contention and transmission variables, skipping the corresponding draws

    Outputs:
    - indicator vector I(t)
    - the next IrdsState
    '''
    weights = np.asarray(weights, dtype=float)
    N = len(weights)
    assert N >= 1, "IRDS needs at least one pair"
    prev = np.asarray(state.prev_decision, dtype=bool) if len(state.prev_decision) else np.zeros(N, dtype=bool)

    a = rng.random(N) < 1/N if a is None else np.asarray(a, dtype=bool)
    p = rng.random(N) < sp.special.expit(weights) if p is None else np.asarray(p, dtype=bool)

    contention_won = a & (np.sum(a) == 1)            # Condition 1
    neighbours_idle = np.sum(prev) - prev == 0         # Condition 2
    case1 = contention_won & neighbours_idle & p
    case2 = ~contention_won & p
    active = case1 | (case2 & prev)
    return active, IrdsState(active.copy())

def estimate_beta(winner_weights, max_weights, success=None) -> float:
    '''
    Empirical imperfect-scheduling loss 1 - sum(W_winner)/sum(W_max) over successful slots

    Inputs:
    - winner_weights: weight of the scheduled pair(s) per slot
    - max_weights: largest weight per slot
    - success: optional mask of successful slots; all slots when None

    Outputs:
    - beta in [0,1], or None when there is no successful slot
    '''
    winner_weights, max_weights = np.asarray(winner_weights, dtype=float), np.asarray(max_weights, dtype=float)
    if success is not None:
        success = np.asarray(success, dtype=bool)
        winner_weights, max_weights = winner_weights[success], max_weights[success]
    total = np.sum(max_weights)
    if len(max_weights) == 0 or total <= 0: return None
    return float(np.clip(1 - np.sum(winner_weights)/total, 0.0, 1.0))
