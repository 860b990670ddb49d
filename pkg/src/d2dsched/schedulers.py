from abc import ABC, abstractmethod
try:
    from typing import override
except ImportError:  # Python < 3.12
    def override(method):
        method.__override__ = True
        return method
import logging
import numpy as np

from .keys import Schedulers, Causes
from .channel import ChannelModel, ChannelState, sample_channel_pool, rate
from .contention import ScheduleDecision, IrdsState, centralized_schedule, cads_contend, irds_step
from .mapping import ThresholdMap, map_uniform, map_linear, map_threshold, estimate_weight_cdfs, optimize_thresholds

logger = logging.getLogger(__name__)

class Scheduler(ABC):
    def __init__(self, config, channel: ChannelModel):
        """
        Create a Scheduler, which decides every slot which pair(s) transmit

        Inputs:
        - config: the SimConfig of the run
        - channel: the channel model of the run
        """
        assert config.N == channel.N, f"config describes {config.N} pairs, but the channel model describes {channel.N}"
        self._config = config
        self._channel = channel

    @abstractmethod
    def schedule(self, state, channel_state: ChannelState, rates: np.ndarray, weights: np.ndarray, rng: np.random.Generator) -> ScheduleDecision:
        """
        Decide the transmissions of one slot

        Inputs:
        - state: the NetworkState at the start of the slot (Q, Z, last decisions)
        - channel_state: this slot's gains
        - rates: R_i(t)
        - weights: W_i(t)
        - rng: random source of the run

        Outputs:
        - ScheduleDecision
        """
        pass

    @property
    def config(self):
        return self._config

    @property
    def channel(self) -> ChannelModel:
        return self._channel

    @property
    def name(self) -> str:
        return self.config.scheduler

    @property
    def W_max(self) -> float:
        return None

class CentralizedScheduler(Scheduler):
    @override
    def schedule(self, state, channel_state: ChannelState, rates: np.ndarray, weights: np.ndarray, rng: np.random.Generator) -> ScheduleDecision:
        return centralized_schedule(weights, channel_state.g, self.config.P, self.config.nu)

class CadsScheduler(Scheduler):
    def __init__(self, config, channel: ChannelModel, mapping: str):
        """
        Create a CADS scheduler

        Inputs:
        - config: the SimConfig of the run
        - channel: the channel model of the run
        - mapping: 'uniform', 'linear' or 'optimal'
        """
        super().__init__(config, channel)
        assert mapping in ('uniform', 'linear', 'optimal'), f"mapping must be 'uniform', 'linear' or 'optimal', but was '{mapping}'"
        self._mapping = mapping
        self._W_max = config.W_max
        self._thresholds = None
        self._optimised_at = None

    @property
    def mapping(self) -> str:
        return self._mapping

    @property
    @override
    def W_max(self) -> float:
        return self._W_max if self.mapping == 'linear' else None

    @property
    def thresholds(self) -> ThresholdMap:
        return self._thresholds

    def estimate_W_max(self, rng: np.random.Generator) -> float:
        '''
        The agreed linear-mapping cap: the 99th percentile of V*R, the weight at which flow control stops admitting

        Inputs:
        - rng: random source

        Outputs:
        - W_max
        '''
        h, _ = sample_channel_pool(self.channel, rng, self.config.cdf_samples)
        W_max = float(np.percentile(self.config.V*rate(h, self.config.P, self.config.N0), 99))
        if W_max <= 0: W_max = self.config.V # every direct gain drawn was 0
        logger.info(f"agreed on W_max={W_max:.6g} for linear mapping")
        return W_max

    def _optimisation_due(self, slot: int) -> bool:
        if self._optimised_at is None: return True
        refresh = self.config.threshold_refresh
        return refresh > 0 and slot - self._optimised_at >= refresh

    @override
    def schedule(self, state, channel_state: ChannelState, rates: np.ndarray, weights: np.ndarray, rng: np.random.Generator) -> ScheduleDecision:
        config = self.config
        M = config.M

        if self.mapping == 'linear':
            if self._W_max is None: self._W_max = self.estimate_W_max(rng)
            slots = [map_linear(w, self._W_max, M) for w in weights]
            return cads_contend(slots, M, config.tau)

        cdfs = estimate_weight_cdfs(self.channel, state.Q, state.Z, config.P, config.N0, config.cdf_samples, rng)
        if self.mapping == 'uniform':
            slots = [map_uniform(w, cdf, M) for w, cdf in zip(weights, cdfs)]
            return cads_contend(slots, M, config.tau)

        if self._optimisation_due(state.slot) and any(not cdf.degenerate for cdf in cdfs):
            thresholds = optimize_thresholds(self.channel, state.Q, state.Z, config, rng)
            if thresholds.quantiles is not None:
                self._thresholds, self._optimised_at = thresholds, state.slot
        if self._thresholds is None: slots = [map_uniform(w, cdf, M) for w, cdf in zip(weights, cdfs)]
        else: slots = [map_threshold(w, cdf.thresholds_at(self._thresholds.quantiles)) for w, cdf in zip(weights, cdfs)]
        return cads_contend(slots, M, config.tau)

class IrdsScheduler(Scheduler):
    @override
    def schedule(self, state, channel_state: ChannelState, rates: np.ndarray, weights: np.ndarray, rng: np.random.Generator) -> ScheduleDecision:
        irds_state = state.irds if state.irds is not None else IrdsState.empty(len(weights))
        active, _ = irds_step(irds_state, weights, rng)
        transmitting = np.flatnonzero(active)
        if len(transmitting) == 0: return ScheduleDecision(active, Causes.idle_no_contender)
        winner = int(transmitting[0]) if len(transmitting) == 1 else None
        return ScheduleDecision(active, Causes.scheduled, winner)

def make_scheduler(config, channel: ChannelModel) -> Scheduler:
    '''
    Build the scheduler named by config.scheduler

    Inputs:
    - config: the SimConfig of the run
    - channel: the channel model of the run

    Outputs:
    - Scheduler
    '''
    match config.scheduler:
        case Schedulers.centralized: return CentralizedScheduler(config, channel)
        case Schedulers.cads_uniform: return CadsScheduler(config, channel, 'uniform')
        case Schedulers.cads_linear: return CadsScheduler(config, channel, 'linear')
        case Schedulers.cads_optimal: return CadsScheduler(config, channel, 'optimal')
        case Schedulers.irds: return IrdsScheduler(config, channel)
    raise AssertionError(f"'scheduler' must be one of the known schedulers, but was '{config.scheduler}'")
