from types import SimpleNamespace

Keys = SimpleNamespace(
    x                    = 'x',
    served               = 'served',
    utility_sum          = 'utility_sum',
    mean_Q               = 'mean_Q',
    mean_Q_per_pair      = 'mean_Q_per_pair',
    mean_Z               = 'mean_Z',
    avg_interference     = 'avg_interference',
    scheduled_fraction   = 'scheduled_fraction',
    collision_fraction   = 'collision_fraction',
    idle_fraction        = 'idle_fraction',
    beta_hat             = 'beta_hat',
    weight_ratio         = 'weight_ratio',
    W_max                = 'W_max',
    horizon              = 'horizon',
    trace                = 'trace',
    slot                 = 't',
    winner               = 'winner',
    transmitters         = 'transmitters',
    cause                = 'cause',
    Z                    = 'Z',
    interference         = 'interference',
    parameter            = 'parameter',
    value                = 'value',
    valid                = 'valid',
    error                = 'error',
    gamma                = 'gamma',
    pair                 = 'pair',
    feasible             = 'feasible',
    converged            = 'converged',
    iterations           = 'iterations',
    mu                   = 'mu'
)

Schedulers = SimpleNamespace(
    centralized  = 'centralized',
    cads_uniform = 'cads_uniform',
    cads_linear  = 'cads_linear',
    cads_optimal = 'cads_optimal',
    irds         = 'irds'
)

Causes = SimpleNamespace(
    scheduled                = 'scheduled',
    idle_all_negative        = 'idle_all_negative',
    idle_collision           = 'idle_collision',
    idle_no_contender        = 'idle_no_contender',
    idle_instantaneous_limit = 'idle_instantaneous_limit'
)

Utilities = SimpleNamespace(
    log = 'log'
)

Channels = SimpleNamespace(
    exponential = 'exponential',
    constant    = 'constant'
)

SweepParameters = SimpleNamespace(
    V     = 'V',
    gamma = 'gamma',
    N     = 'N',
    M     = 'M',
    tau   = 'tau'
)

def namespace_values(namespace: SimpleNamespace) -> tuple:
    '''
    Get all values of a key namespace, in definition order

    Inputs:
    - namespace: one of the namespaces in this module

    Outputs:
    - tuple of the values
    '''
    return tuple(vars(namespace).values())
