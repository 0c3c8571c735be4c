"""Fair allocation of indivisible goods under network externalities."""

from .allocation import Allocation, Partition, extreme_allocation, utilities, worst_value_network
from .claiming import check_external_satisfaction, cut_and_choose, run_bc
from .errors import *  # noqa: F401,F403
from .instance import Instance, bundle_value, influence_vector, new_instance
from .metrics import (
    average_share,
    check_allocation,
    emms,
    extended_proportional_share,
    gap_instance,
    mms,
)
from .partitioning import (
    huge_items,
    is_nice,
    lpt_partition,
    nicify,
    objective_vector,
    optimal_partition_exact,
)

__version__ = "0.1.0"
