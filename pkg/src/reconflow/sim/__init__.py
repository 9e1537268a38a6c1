from .interp import CoverageRecorder, Fault
from .stimulus import Stimulus, load_stimuli
from .timed import DeadlineResult, StatsReport, Transaction, simulate_timed
from .trace import EQUAL, Divergence, Trace, compare_traces
from .transform import TO_HW, TO_SW, to_fpga, transform_group_sw, transform_move_module
from .untimed import simulate_untimed

__all__ = [
    "CoverageRecorder", "Fault", "Stimulus", "load_stimuli", "DeadlineResult",
    "StatsReport", "Transaction", "simulate_timed", "EQUAL", "Divergence", "Trace",
    "compare_traces", "TO_HW", "TO_SW", "to_fpga", "transform_group_sw",
    "transform_move_module", "simulate_untimed",
]
