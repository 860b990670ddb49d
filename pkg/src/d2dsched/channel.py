from dataclasses import dataclass
import numpy as np

from .keys import Channels

@dataclass(frozen=True)
class ChannelModel:
    '''
    Block fading model of N D2D pairs. Gains are constant within a slot and iid across slots.

    Fields:
    - direct_means: mean direct power gain h_i per pair, shape [N]
    - interference_means: mean interference power gain g_i (pair i to the access point) per pair, shape [N]
    - direct_kind: 'exponential' (Rayleigh fading power) or 'constant' (point mass at the mean)
    - interference_kind: same choices, for the interference gains
    '''
    direct_means: np.ndarray
    interference_means: np.ndarray
    direct_kind: str = Channels.exponential
    interference_kind: str = Channels.exponential

    def __post_init__(self):
        object.__setattr__(self, 'direct_means', np.asarray(self.direct_means, dtype=float).reshape(-1))
        object.__setattr__(self, 'interference_means', np.asarray(self.interference_means, dtype=float).reshape(-1))
        assert len(self.direct_means) >= 1, "channel model must describe at least one pair"
        assert self.direct_means.shape == self.interference_means.shape, f"direct_means and interference_means must have equal length, but had {len(self.direct_means)} and {len(self.interference_means)}"
        assert np.all(self.direct_means >= 0) and np.all(self.interference_means >= 0), "channel gain means must be nonnegative"
        assert self.direct_kind in (Channels.exponential, Channels.constant), f"direct_kind must be one of {Channels.exponential}, {Channels.constant}, but was {self.direct_kind}"
        assert self.interference_kind in (Channels.exponential, Channels.constant), f"interference_kind must be one of {Channels.exponential}, {Channels.constant}, but was {self.interference_kind}"

    @classmethod
    def symmetric(cls, N: int, direct_mean: float=2.0, interference_mean: float=1.0, kind: str=Channels.exponential) -> 'ChannelModel':
        '''
        Build a model where all N pairs share the same gain laws
        '''
        return cls(np.full(N, float(direct_mean)), np.full(N, float(interference_mean)), kind, kind)

    @property
    def N(self) -> int:
        return len(self.direct_means)

    @property
    def iid_across_time(self) -> bool:
        return True

@dataclass(frozen=True)
class ChannelState:
    '''
    The gains of one slot

    Fields:
    - h: direct gains, shape [N]
    - g: interference gains, shape [N]
    - slot_index: the slot these gains belong to
    '''
    h: np.ndarray
    g: np.ndarray
    slot_index: int = 0

    @property
    def N(self) -> int:
        return len(self.h)

def _draw(kind: str, means: np.ndarray, rng: np.random.Generator, shape: tuple) -> np.ndarray:
    if kind == Channels.constant: return np.broadcast_to(means, shape).astype(float)
    return rng.standard_exponential(shape)*means

def sample_channel(model: ChannelModel, rng: np.random.Generator, t: int=0) -> ChannelState:
    '''
    Draw the gains of a single slot. Draw order is h_1..h_N, then g_1..g_N.

    Inputs:
    - model: the channel model
    - rng: the random source of the run
    - t: slot index to stamp on the state

    Outputs:
    - ChannelState of slot t
    '''
    h = _draw(model.direct_kind, model.direct_means, rng, (model.N,))
    g = _draw(model.interference_kind, model.interference_means, rng, (model.N,))
    return ChannelState(h, g, t)

def sample_channel_pool(model: ChannelModel, rng: np.random.Generator, samples: int) -> tuple:
    '''
    Draw many independent channel states at once, for Monte Carlo expectations

    Inputs:
    - model: the channel model
    - rng: random source
    - samples: number of states S

    Outputs:
    - h: direct gains, shape [S,N]
    - g: interference gains, shape [S,N]
    '''
    assert samples >= 1, f"samples must be at least 1, but was {samples}"
    h = _draw(model.direct_kind, model.direct_means, rng, (samples, model.N))
    g = _draw(model.interference_kind, model.interference_means, rng, (samples, model.N))
    return h, g

def rate(h, P: float=1.0, N0: float=1.0):
    '''
    Shannon rate in nats per slot, ln(1+P*h/N0)

    Inputs:
    - h: direct gain, scalar or array
    - P: transmit power
    - N0: noise power

    Outputs:
    - rate with the shape of h
    '''
    assert P > 0 and N0 > 0, f"P and N0 must be positive, but were {P} and {N0}"
    rates = np.log1p(P*np.asarray(h, dtype=float)/N0)
    return float(rates) if rates.ndim == 0 else rates
