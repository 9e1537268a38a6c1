from .analysis import (
    NOT_FOUND, PROVEN_UNREACHABLE, UNBOUNDED_FIFO, UNKNOWN, DeadlockReport, MarkingConstraint,
    check_unreachable, count_targets, deadlock_targets, fifo_bound, find_witness,
    prove_deadlock_free, reachable_markings,
)
from .petri import PetriNet, Transition, extract_net, net_modules
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, LPResult, solve_lp
from .timing import FAIL, PASS, DeadlineVerdict, deadline_check, node_costs
