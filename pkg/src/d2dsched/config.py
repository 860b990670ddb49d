from dataclasses import dataclass, fields, asdict, replace
import os
import json
import math
import numpy as np

from .keys import Schedulers, Utilities, Channels
from .channel import ChannelModel
from .verify import assert_config_valid

@dataclass(frozen=True)
class SimConfig:
    '''
    All scalars of a simulation run. Defaults are a ten-pair network with Rayleigh fading.
    '''
    N: int = 10
    P: float = 1.0
    N0: float = 1.0
    gamma: float = 1.0
    nu: float = math.inf
    V: float = 200.0
    A_max: float = 10.0
    M: int = 200
    tau: float = 1e-4
    horizon: int = 100000
    seed: int = 0
    scheduler: str = Schedulers.centralized
    utility: str = Utilities.log
    W_max: float = None                 # CADS linear mapping cap; None estimates it at run start
    cdf_samples: int = 2000             # fresh draws per slot for weight CDF estimation
    channel: str = Channels.exponential
    direct_mean: float = 2.0
    interference_mean: float = 1.0
    direct_means: tuple = None          # per-pair means, override direct_mean
    interference_means: tuple = None
    threshold_samples: int = 10000
    threshold_restarts: int = 3
    threshold_sweeps: int = 2
    threshold_refresh: int = 10000      # re-optimise CADS thresholds every this many slots, 0 = once
    trace: bool = False

    def with_values(self, **values) -> 'SimConfig':
        '''
        Copy with some fields replaced, validated
        '''
        config = replace(self, **{key: _coerce(key, value) for key, value in values.items()})
        assert_config_valid(config)
        return config

_field_types = {field.name: field.type for field in fields(SimConfig)}
_optional_floats = ('W_max',)
_tuples = ('direct_means', 'interference_means')

def _coerce(key: str, value):
    assert key in _field_types, f"unknown configuration key '{key}'"
    if value is None:
        assert key in _optional_floats + _tuples, f"configuration key '{key}' may not be null"
        return None
    if key in _tuples:
        assert isinstance(value, list | tuple), f"configuration key '{key}' must be a list, but was {value!r}"
        return tuple(float(v) for v in value)
    if key in _optional_floats: return float(value)

    field_type = _field_types[key]
    try:
        if field_type == 'bool' or field_type is bool:
            if isinstance(value, str): return value.strip().lower() in ('1', 'true', 'yes')
            return bool(value)
        if field_type == 'int' or field_type is int:
            assert float(value) == int(float(value)), f"configuration key '{key}' must be an integer, but was {value!r}"
            return int(float(value))
        if field_type == 'float' or field_type is float: return float(value)
    except (TypeError, ValueError):
        raise AssertionError(f"configuration key '{key}' has an invalid value {value!r}")
    return str(value)

def _parse_override(override: str) -> tuple:
    assert '=' in override, f"override must have the form key=value, but was '{override}'"
    key, value = override.split('=', 1)
    key, value = key.strip(), value.strip()
    try: value = json.loads(value)
    except json.JSONDecodeError: pass
    return key, value

def read_config(path: str=None, overrides=None) -> SimConfig:
    '''
    Read a SimConfig from a flat JSON file. Missing keys take their defaults.

    Inputs:
    - path: path to the configuration file; None or an empty file gives the defaults
    - overrides: 'key=value' strings or a dict, applied over the file

    Outputs:
    - validated SimConfig
    '''
    values = {}
    if path is not None:
        assert os.path.isfile(path), f"Path \"{path}\" does not exist"
        with open(path, 'r') as f: text = f.read()
        if text.strip():
            values = json.loads(text)
            assert isinstance(values, dict), f"configuration file \"{path}\" must hold a flat JSON object"

    if overrides is not None:
        if isinstance(overrides, dict): values.update(overrides)
        else: values.update(dict(_parse_override(override) for override in overrides))

    config = SimConfig(**{key: _coerce(key, value) for key, value in values.items()})
    assert_config_valid(config)
    return config

def config_to_dict(config: SimConfig) -> dict:
    '''
    Flat JSON-compatible dict of a config; infinities are written as the string "inf"
    '''
    values = asdict(config)
    for key, value in values.items():
        if isinstance(value, float) and math.isinf(value): values[key] = 'inf' if value > 0 else '-inf'
        elif isinstance(value, tuple): values[key] = list(value)
    return values

def write_config(config: SimConfig, path: str):
    '''
    Write a config as a flat JSON file that read_config parses back to an identical config
    '''
    with open(path, 'w') as f: json.dump(config_to_dict(config), f, indent=2)

def channel_model(config: SimConfig) -> ChannelModel:
    '''
    Build the ChannelModel described by a config
    '''
    direct = np.array(config.direct_means) if config.direct_means is not None else np.full(config.N, config.direct_mean)
    interference = np.array(config.interference_means) if config.interference_means is not None else np.full(config.N, config.interference_mean)
    return ChannelModel(direct, interference, config.channel, config.channel)
