from dataclasses import dataclass
from concurrent.futures import ProcessPoolExecutor
import logging
import numpy as np
from tqdm import tqdm

from .keys import SweepParameters, namespace_values
from .config import SimConfig
from .simulate import Metrics, run_simulation, average_metrics

logger = logging.getLogger(__name__)

@dataclass
class SweepRow:
    '''
    Fields:
    - parameter: the swept SimConfig key
    - value: the value of this row
    - metrics: the run's Metrics, None when the derived config was invalid
    - error: the validation message of an invalid row
    '''
    parameter: str
    value: float
    metrics: Metrics = None
    error: str = None

    @property
    def valid(self) -> bool:
        return self.metrics is not None

def derive_seed(seed: int, index: int) -> int:
    '''
    Reproducible, independent child seed of a base seed
    '''
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])

def _sweep_row(arguments: tuple) -> SweepRow:
    base, parameter, index, value = arguments
    try:
        config = base.with_values(**{parameter: value, 'seed': derive_seed(base.seed, index)})
    except AssertionError as error:
        logger.warning(f"sweep value {parameter}={value} is invalid: {error}")
        return SweepRow(parameter, value, None, str(error))
    return SweepRow(parameter, value, run_simulation(config))

def _run_jobs(function, arguments: list, jobs: int, verbose: bool, desc: str) -> list:
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            results = executor.map(function, arguments)
            if verbose: results = tqdm(results, total=len(arguments), desc=desc)
            return list(results)
    if verbose: arguments = tqdm(arguments, desc=desc)
    return [function(argument) for argument in arguments]

def sweep(base: SimConfig, parameter: str, values, jobs: int=1, verbose: bool=False) -> list:
    """
    Run one independent simulation per parameter value

    Inputs:
    - base: the SimConfig every run starts from
    - parameter: one of V, gamma, N, M, tau
    - values: nonempty sequence of values
    - jobs: number of worker processes
    - verbose: if True, show a progress bar

    Outputs:
    - list of SweepRow in the order of values; invalid values give rows with valid=False
    """
    values = list(values)
    assert parameter in namespace_values(SweepParameters), f"parameter must be one of {namespace_values(SweepParameters)}, but was '{parameter}'"
    assert len(values) > 0, "values must not be empty"
    logger.info(f"sweeping {parameter} over {values} with {jobs} job(s)")
    return _run_jobs(_sweep_row, [(base, parameter, index, value) for index, value in enumerate(values)], jobs, verbose, f"{parameter} sweep")

def noniid_config(config: SimConfig, run: int, direct_range: tuple=(1.2, 2.8), interference_range: tuple=(0.2, 1.8)) -> SimConfig:
    '''
    The config of one non-iid run: per-pair means drawn uniformly from the given ranges, seed advanced by the run index

    Inputs:
    - config: the base SimConfig
    - run: run index
    - direct_range: (low, high) of the mean direct gains
    - interference_range: (low, high) of the mean interference gains

    Outputs:
    - SimConfig
    '''
    assert direct_range[0] <= direct_range[1], f"direct_range must be ordered, but was {direct_range}"
    assert interference_range[0] <= interference_range[1], f"interference_range must be ordered, but was {interference_range}"
    rng = np.random.default_rng([config.seed, run])
    direct = rng.uniform(direct_range[0], direct_range[1], config.N)
    interference = rng.uniform(interference_range[0], interference_range[1], config.N)
    return config.with_values(direct_means=direct.tolist(), interference_means=interference.tolist(), seed=config.seed + run)

def _noniid_run(arguments: tuple) -> Metrics:
    return run_simulation(noniid_config(*arguments))

def run_noniid(config: SimConfig, runs: int, direct_range: tuple=(1.2, 2.8), interference_range: tuple=(0.2, 1.8), jobs: int=1, verbose: bool=False) -> Metrics:
    """
    Average Metrics over runs with independently drawn per-pair channel means

    Inputs:
    - config: the base SimConfig
    - runs: number of runs, >= 1
    - direct_range: (low, high) of the mean direct gains
    - interference_range: (low, high) of the mean interference gains
    - jobs: number of worker processes
    - verbose: if True, show a progress bar

    Outputs:
    - averaged Metrics
    """
    assert runs >= 1, f"runs must be at least 1, but was {runs}"
    logger.info(f"averaging {runs} non-iid runs, direct means in {direct_range}, interference means in {interference_range}")
    arguments = [(config, run, direct_range, interference_range) for run in range(runs)]
    return average_metrics(_run_jobs(_noniid_run, arguments, jobs, verbose, "non-iid runs"))
