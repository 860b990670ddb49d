import math
import numpy as np

from .keys import Schedulers, Utilities, Channels, namespace_values

def assert_config_valid(config):
    '''
    Verify that a SimConfig is usable. Doesn't return anything, but throws an exception naming the offending key if the config is invalid.

    Inputs:
    - config: the SimConfig to check
    '''
    assert isinstance(config.N, int) and config.N >= 1, f"'N' must be an integer of at least 1, but was {config.N}"
    assert config.P > 0, f"'P' must be positive, but was {config.P}"
    assert config.N0 > 0, f"'N0' must be positive, but was {config.N0}"
    assert config.gamma >= 0, f"'gamma' must be at least 0, but was {config.gamma}"
    assert config.nu > 0, f"'nu' must be positive, but was {config.nu}"
    assert config.V > 0 and math.isfinite(config.V), f"'V' must be positive and finite, but was {config.V}"
    assert config.A_max > 0 and math.isfinite(config.A_max), f"'A_max' must be positive and finite, but was {config.A_max}"
    assert isinstance(config.M, int) and config.M >= 1, f"'M' must be an integer of at least 1, but was {config.M}"
    assert 0 < config.M*config.tau < 1, f"'M' and 'tau' must satisfy 0 < M*tau < 1, but M*tau was {config.M*config.tau}"
    assert isinstance(config.horizon, int) and config.horizon >= 0, f"'horizon' must be an integer of at least 0, but was {config.horizon}"
    assert isinstance(config.seed, int) and config.seed >= 0, f"'seed' must be a nonnegative integer, but was {config.seed}"
    assert config.scheduler in namespace_values(Schedulers), f"'scheduler' must be one of {namespace_values(Schedulers)}, but was '{config.scheduler}'"
    assert config.utility in namespace_values(Utilities), f"'utility' must be one of {namespace_values(Utilities)}, but was '{config.utility}'"
    assert config.W_max is None or config.W_max > 0, f"'W_max' must be null or positive, but was {config.W_max}"
    assert config.cdf_samples >= 1, f"'cdf_samples' must be at least 1, but was {config.cdf_samples}"
    assert config.channel in namespace_values(Channels), f"'channel' must be one of {namespace_values(Channels)}, but was '{config.channel}'"
    assert config.direct_mean >= 0, f"'direct_mean' must be at least 0, but was {config.direct_mean}"
    assert config.interference_mean >= 0, f"'interference_mean' must be at least 0, but was {config.interference_mean}"
    for key in ('direct_means', 'interference_means'):
        means = getattr(config, key)
        if means is None: continue
        assert len(means) == config.N, f"'{key}' must have N={config.N} entries, but had {len(means)}"
        assert all(mean >= 0 for mean in means), f"'{key}' entries must be at least 0"
    assert config.threshold_samples >= 1, f"'threshold_samples' must be at least 1, but was {config.threshold_samples}"
    assert config.threshold_restarts >= 1, f"'threshold_restarts' must be at least 1, but was {config.threshold_restarts}"
    assert config.threshold_sweeps >= 1, f"'threshold_sweeps' must be at least 1, but was {config.threshold_sweeps}"
    assert config.threshold_refresh >= 0, f"'threshold_refresh' must be at least 0, but was {config.threshold_refresh}"

def assert_channel_state_valid(state, N: int=None):
    '''
    Verify that a ChannelState has matching nonnegative gain vectors. Doesn't return anything, but throws an exception if the state is invalid.

    Inputs:
    - state: the ChannelState to check
    - N: expected number of pairs, if known
    '''
    assert np.shape(state.h) == np.shape(state.g), f"h and g must have equal shapes, but had {np.shape(state.h)} and {np.shape(state.g)}"
    assert N is None or len(state.h) == N, f"channel state must describe {N} pairs, but described {len(state.h)}"
    assert np.all(state.h >= 0) and np.all(state.g >= 0), "channel gains must be nonnegative"
    assert state.slot_index >= 0, f"slot_index must be at least 0, but was {state.slot_index}"

def assert_multipliers_valid(multipliers, N: int=None):
    '''
    Verify that Lagrange multipliers are nonnegative. Doesn't return anything, but throws an exception if they are invalid.

    Inputs:
    - multipliers: the Multipliers to check
    - N: number of pairs, if known; lambda must then have N-1 entries
    '''
    assert N is None or len(multipliers.lam) == N-1, f"lambda must have N-1={N-1} entries, but had {len(multipliers.lam)}"
    assert np.all(np.asarray(multipliers.lam) >= 0), "lambda must be nonnegative"
    assert multipliers.mu >= 0, f"mu must be nonnegative, but was {multipliers.mu}"

def assert_bound_params_valid(params):
    '''
    Verify BoundParams. Doesn't return anything, but throws an exception if they are invalid.

    Inputs:
    - params: the BoundParams to check
    '''
    assert params.N >= 1, f"N must be at least 1, but was {params.N}"
    assert params.M >= 1, f"M must be at least 1, but was {params.M}"
    assert 0 <= params.M*params.tau <= 1, f"M*tau must lie in [0,1], but was {params.M*params.tau}"
    assert 0 <= params.beta <= 1, f"beta must lie in [0,1], but was {params.beta}"

def assert_metrics_valid(metrics, A_max: float=None):
    '''
    Verify the invariants of a Metrics record. Doesn't return anything, but throws an exception if an invariant is broken.

    Inputs:
    - metrics: the Metrics to check
    - A_max: admission cap of the run, if known
    '''
    x = np.asarray(metrics.x)
    assert np.all(x >= 0), "admitted rates must be nonnegative"
    assert A_max is None or np.all(x <= A_max + 1e-12), f"admitted rates must be at most A_max={A_max}"
    assert metrics.avg_interference >= 0, "average interference must be nonnegative"
    fractions = (metrics.scheduled_fraction, metrics.collision_fraction, metrics.idle_fraction)
    assert all(0 <= fraction <= 1 for fraction in fractions), f"slot fractions must lie in [0,1], but were {fractions}"
    assert metrics.horizon == 0 or math.isclose(sum(fractions), 1.0), f"slot fractions must add up to 1, but added up to {sum(fractions)}"
