from dataclasses import dataclass
import numpy as np

from .keys import Utilities

@dataclass(frozen=True)
class UtilityFn:
    '''
    Per-pair utility of the long-run admitted rate. Only the proportional fair U(x) = ln(1+x) is defined.
    '''
    kind: str = Utilities.log

    def __post_init__(self):
        assert self.kind in (Utilities.log,), f"utility kind must be '{Utilities.log}', but was {self.kind}"

    def __call__(self, x):
        values = np.log1p(np.asarray(x, dtype=float))
        return float(values) if values.ndim == 0 else values

    def admission(self, Q, V: float, A_max: float):
        '''
        Solve argmax_{0<=x<=A_max} V*U(x) - Q*x

        Inputs:
        - Q: backlog, scalar or array
        - V: flow control weight
        - A_max: admission cap

        Outputs:
        - admitted bits, with the shape of Q
        '''
        Q = np.asarray(Q, dtype=float)
        with np.errstate(divide='ignore'):
            interior = np.where(Q > 0, V/np.where(Q > 0, Q, 1.0) - 1.0, A_max) # Q=0 admits A_max
        admitted = np.clip(interior, 0.0, A_max)
        return float(admitted) if admitted.ndim == 0 else admitted

    def utility_sum(self, x) -> float:
        return float(np.sum(self(np.asarray(x, dtype=float))))

def flow_control(Q, V: float, utility: UtilityFn, A_max: float):
    '''
    Decide how many bits each pair injects into its queue this slot

    Inputs:
    - Q: current backlog Q_i(t), scalar or array
    - V: utility weight, > 0
    - utility: the utility function
    - A_max: maximum admitted bits per slot, > 0

    Outputs:
    - A_i(t), with the shape of Q
    '''
    assert V > 0, f"V must be positive, but was {V}"
    assert A_max > 0, f"A_max must be positive, but was {A_max}"
    assert np.all(np.asarray(Q) >= 0), "backlogs must be nonnegative"
    return utility.admission(Q, V, A_max)

def weight(Q, R, Z: float, P: float, g):
    '''
    Max-weight scheduling weight W = Q*R - Z*P*g

    Inputs:
    - Q: backlog(s)
    - R: rate(s) this slot
    - Z: interference virtual queue backlog
    - P: transmit power
    - g: interference gain(s)

    Outputs:
    - weight(s), with the broadcast shape of the inputs
    '''
    weights = np.asarray(Q, dtype=float)*np.asarray(R, dtype=float) - Z*P*np.asarray(g, dtype=float)
    return float(weights) if weights.ndim == 0 else weights

def update_real_queue(Q, served, arrived):
    '''
    Q(t+1) = [Q(t) - served]^+ + arrived
    '''
    Q_next = np.maximum(np.asarray(Q, dtype=float) - served, 0.0) + arrived
    return float(Q_next) if Q_next.ndim == 0 else Q_next

def update_virtual_queue(Z: float, gamma: float, interference: float) -> float:
    '''
    Z(t+1) = [Z(t) - gamma + interference]^+, where interference is the realised sum_i I_i*P*g_i
    '''
    return max(0.0, Z - gamma + interference)
