from .keys import Keys, Schedulers, Causes, Utilities, Channels, SweepParameters
from .config import SimConfig, read_config, write_config, config_to_dict, channel_model
from .channel import ChannelModel, ChannelState, sample_channel, sample_channel_pool, rate
from .control import UtilityFn, flow_control, weight, update_real_queue, update_virtual_queue
from .mapping import WeightCdf, ThresholdMap, map_uniform, map_linear, map_threshold, estimate_weight_cdf, estimate_weight_cdfs, weight_samples, threshold_objective, power_knots, optimize_quantiles, optimize_thresholds
from .contention import ScheduleDecision, IrdsState, centralized_schedule, cads_contend, irds_step, estimate_beta
from .schedulers import Scheduler, CentralizedScheduler, CadsScheduler, IrdsScheduler, make_scheduler
from .boundary import Multipliers, BoundaryPoint, dual_schedule, solve_boundary_point, solve_unconstrained_point, trace_region
from .bounds import BoundParams, p_success_given_slot, pk_sequence, alpha_bound, check_pk_sequence, success_probability, uniform_contention_ratio, drift_constant_C1, drift_constant_B1
from .simulate import NetworkState, Metrics, run_simulation, average_metrics
from .sweep import SweepRow, derive_seed, sweep, noniid_config, run_noniid
from .verify import assert_config_valid, assert_channel_state_valid, assert_multipliers_valid, assert_bound_params_valid, assert_metrics_valid
from .write import write_metrics_json, write_metrics_csv, write_sweep_csv, write_boundary_csv, write_bound_csv, write_trace_csv
