from dataclasses import dataclass, field
import logging
import numpy as np
from tqdm import tqdm

from .keys import Keys, Causes
from .config import SimConfig, channel_model
from .channel import sample_channel, rate
from .control import UtilityFn, flow_control, weight, update_real_queue, update_virtual_queue
from .contention import IrdsState, estimate_beta
from .schedulers import make_scheduler
from .verify import assert_config_valid, assert_metrics_valid

logger = logging.getLogger(__name__)

@dataclass
class NetworkState:
    '''
    Fields:
    - Q: real queue backlogs Q_i(t) in bits
    - Z: interference virtual queue backlog Z(t)
    - irds: the previous slot's transmissions, read by IRDS
    - slot: the current slot index t
    '''
    Q: np.ndarray
    Z: float = 0.0
    irds: IrdsState = None
    slot: int = 0

    @classmethod
    def initial(cls, N: int) -> 'NetworkState':
        return cls(np.zeros(N), 0.0, IrdsState.empty(N), 0)

@dataclass
class Metrics:
    '''
    Long-run averages of one run. Per-pair fields have shape [N].
    '''
    x: np.ndarray
    served: np.ndarray
    utility_sum: float
    mean_Q: float
    mean_Q_per_pair: np.ndarray
    mean_Z: float
    avg_interference: float
    scheduled_fraction: float
    collision_fraction: float
    idle_fraction: float
    beta_hat: float = None
    weight_ratio: float = None
    W_max: float = None
    horizon: int = 0
    trace: list = field(default_factory=list)

    def to_dict(self) -> dict:
        '''
        JSON-compatible dict of all fields except the trace
        '''
        values = {}
        for key in (Keys.x, Keys.served, Keys.utility_sum, Keys.mean_Q, Keys.mean_Q_per_pair, Keys.mean_Z, Keys.avg_interference,
                    Keys.scheduled_fraction, Keys.collision_fraction, Keys.idle_fraction, Keys.beta_hat, Keys.weight_ratio, Keys.W_max, Keys.horizon):
            value = getattr(self, key)
            if isinstance(value, np.ndarray): value = [float(v) for v in value]
            elif isinstance(value, float | np.floating): value = float(value)
            values[key] = value
        return values

def _trace_record(t: int, channel_state, admitted, decision, state: NetworkState, interference: float) -> dict:
    N = len(admitted)
    record = {Keys.slot: t}
    record.update({f"h_{i+1}": float(channel_state.h[i]) for i in range(N)})
    record.update({f"g_{i+1}": float(channel_state.g[i]) for i in range(N)})
    record.update({f"A_{i+1}": float(admitted[i]) for i in range(N)})
    record[Keys.winner] = -1 if decision.winner is None else decision.winner
    record[Keys.transmitters] = int(np.sum(decision.active))
    record[Keys.cause] = decision.cause
    record.update({f"Q_{i+1}": float(state.Q[i]) for i in range(N)})
    record[Keys.Z] = float(state.Z)
    record[Keys.interference] = interference
    return record

def _weight_ratio(delivered_weights, max_weights) -> float:
    '''
    sum_t W_winner(t)*effective_fraction(t) / sum_t max(W_max(t), 0) over all slots, or None when no slot had a positive weight
    '''
    total = float(np.sum(max_weights))
    return float(np.sum(delivered_weights))/total if total > 0 else None

def run_simulation(config: SimConfig, verbose: bool=False) -> Metrics:
    """
    Run the drift-plus-penalty control with the configured scheduler for config.horizon slots

    Inputs:
    - config: the SimConfig of the run
    - verbose: if True, show a progress bar

    Outputs:
    - Metrics; deterministic given config.seed
    """
    assert_config_valid(config)
    N, T = config.N, config.horizon
    rng = np.random.default_rng(config.seed)
    channel = channel_model(config)
    scheduler = make_scheduler(config, channel)
    utility = UtilityFn(config.utility)
    state = NetworkState.initial(N)
    logger.info(f"simulating {T} slots of {N} pairs with scheduler '{config.scheduler}', V={config.V}, gamma={config.gamma}, seed={config.seed}")

    admitted_sum, served_sum, Q_sum = np.zeros(N), np.zeros(N), np.zeros(N)
    Z_sum, interference_sum = 0.0, 0.0
    scheduled_count, collision_count = 0, 0
    winner_weights, delivered_weights, max_weights, successes = np.zeros(T), np.zeros(T), np.zeros(T), np.zeros(T, dtype=bool)
    trace = []

    slots = tqdm(range(T), desc="slots") if verbose else range(T)
    for t in slots:
        channel_state = sample_channel(channel, rng, t)
        R = rate(channel_state.h, config.P, config.N0)
        A = flow_control(state.Q, config.V, utility, config.A_max)
        W = weight(state.Q, R, state.Z, config.P, channel_state.g)
        decision = scheduler.schedule(state, channel_state, R, W, rng)

        service = decision.active*R*decision.effective_fraction
        interference = float(np.sum(decision.active*config.P*channel_state.g)*decision.effective_fraction)
        if config.trace: trace.append(_trace_record(t, channel_state, A, decision, state, interference))

        admitted_sum += A
        served_sum += np.minimum(state.Q, service)
        Q_sum += state.Q
        Z_sum += state.Z
        interference_sum += interference
        if decision.scheduled: scheduled_count += 1
        elif decision.cause == Causes.idle_collision: collision_count += 1
        winner_weights[t] = np.sum(W[decision.active])
        delivered_weights[t] = winner_weights[t]*decision.effective_fraction
        max_weights[t] = max(np.max(W), 0.0)
        successes[t] = decision.scheduled

        state = NetworkState(
            update_real_queue(state.Q, service, A),
            update_virtual_queue(state.Z, config.gamma, interference),
            IrdsState(decision.active.copy()),
            t+1
        )

    scale = 1/T if T > 0 else 0.0
    x = admitted_sum*scale
    scheduled_fraction = scheduled_count*scale
    collision_fraction = collision_count*scale
    metrics = Metrics(
        x=x,
        served=served_sum*scale,
        utility_sum=utility.utility_sum(x),
        mean_Q=float(np.sum(Q_sum))*scale,
        mean_Q_per_pair=Q_sum*scale,
        mean_Z=Z_sum*scale,
        avg_interference=interference_sum*scale,
        scheduled_fraction=scheduled_fraction,
        collision_fraction=collision_fraction,
        idle_fraction=(T - scheduled_count - collision_count)*scale,
        beta_hat=estimate_beta(winner_weights, max_weights, successes),
        weight_ratio=_weight_ratio(delivered_weights, max_weights),
        W_max=scheduler.W_max,
        horizon=T,
        trace=trace
    )
    assert_metrics_valid(metrics, config.A_max)
    logger.info(f"finished: utility_sum={metrics.utility_sum:.6g}, served sum={np.sum(metrics.served):.6g}, avg_interference={metrics.avg_interference:.6g}")
    return metrics

def average_metrics(runs: list) -> Metrics:
    '''
    Average several Metrics field by field. beta_hat, weight_ratio and W_max average over the runs that define them; traces are dropped.

    Inputs:
    - runs: nonempty list of Metrics with equal N

    Outputs:
    - averaged Metrics
    '''
    assert len(runs) > 0, "at least one run is needed to average"

    def mean(key):
        return np.mean([getattr(run, key) for run in runs], axis=0)

    def defined_mean(key):
        values = [getattr(run, key) for run in runs if getattr(run, key) is not None]
        return float(np.mean(values)) if values else None

    return Metrics(
        x=mean(Keys.x),
        served=mean(Keys.served),
        utility_sum=float(mean(Keys.utility_sum)),
        mean_Q=float(mean(Keys.mean_Q)),
        mean_Q_per_pair=mean(Keys.mean_Q_per_pair),
        mean_Z=float(mean(Keys.mean_Z)),
        avg_interference=float(mean(Keys.avg_interference)),
        scheduled_fraction=float(mean(Keys.scheduled_fraction)),
        collision_fraction=float(mean(Keys.collision_fraction)),
        idle_fraction=float(mean(Keys.idle_fraction)),
        beta_hat=defined_mean(Keys.beta_hat),
        weight_ratio=defined_mean(Keys.weight_ratio),
        W_max=defined_mean(Keys.W_max),
        horizon=runs[0].horizon
    )
