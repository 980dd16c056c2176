"""Network-assisted full-duplex cell-free massive MIMO planning toolkit.

Closed-form uplink/downlink spectral efficiency under per-AP partial
zero-forcing, a Monte Carlo validator for those expressions, and a
constraint-handling differential-evolution optimizer that jointly picks AP
duplex modes, power control, and large-scale fading decoding weights while
suspending UEs whose QoS cannot be met.
"""

from .closedform import (KERNEL_BACKEND, SEReport, Solution, check_constraints,
                         dl_se_per_ue, se_report, total_se, ul_se_per_ue)
from .config import ConfigFile, NetworkConfig, load_config
from .de import Hyperparams, OptResult, evolve
from .genotype import decode, genotype_length, repair_and_evaluate
from .grouping import (Grouping, LinkGrouping, group_ues, pzf_grouping,
                       specialize_grouping, uniform_grouping)
from .harness import (ExperimentSpec, SlotPolicy, multi_slot_schedule,
                      run_experiment, validate_closed_forms)
from .netgen import (NetworkRealization, Topology, draw_network,
                     generate_topology, large_scale_realization, mmse_gamma,
                     noise_power_watts, path_loss_db, wrap_distance)

__version__ = "0.1.0"
