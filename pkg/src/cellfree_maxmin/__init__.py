"""Joint max-min SINR power control and distributed team-MMSE beamforming
for user-centric cell-free massive MIMO networks."""

from .scenario import (NetworkConfig, NetworkScenario, build_scenario,
                       build_ap_grid, cluster_users, compute_gains,
                       sample_shadow_fading, noise_power_dbm)
from .channel import ChannelEnsemble, LocalCSIView, sample_ensemble, local_view
from .uatf import UatFStatistics, estimate_statistics, sinr, rate, mse
from .teammse import (BeamformerSet, build_team_mmse, build_matched_filter,
                      local_stage, estimate_pi, solve_statistical_stage)
from .powerctl import (InterferenceMap, ConvergenceTrace, fixed_beamformer_map,
                       team_optimal_map, fixed_point_solve, algorithm_fp,
                       algorithm_ao, AlgorithmResult)
from .errors import (ConfigurationError, DegenerateBeamformerError,
                     StatisticalStageError, InternalConsistencyError)

__version__ = "0.1.0"
