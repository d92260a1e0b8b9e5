"""d-hitting families of schedules for partial orders."""

from .antichain import (
    BoundsReport,
    SampledPool,
    bounds_report,
    greedy_family,
    greedy_upper_bound,
    lower_bound,
    probabilistic_k,
    random_family,
)
from .basic import chain_event_family, dfs_family, height_lower_bound, warmup_family
from .doubletree import (
    MMatrix,
    antichain_family_from_leaves,
    arbitrary_tree_family,
    build_M,
    doubletree_family,
    left_traversal,
    right_traversal,
    separation_check,
    tree_family,
)
from .harness import AnnotatedPoset, RunStats, parse_poset, pruned_family, serialize_poset
from .oracle import (
    VerifyReport,
    enumerate_admissible,
    enumerate_schedules,
    is_d_hitting,
    min_hitting_size,
    schedule_hitting,
)
from .patterns import (
    Pattern,
    conforms,
    enumerate_patterns,
    pattern_family,
    pattern_of_tuple,
    schedule_for_pattern,
)
from .poset import (
    Family,
    Poset,
    hits,
    is_admissible,
    lca,
    lca_closure,
    leq,
    make_antichain,
    make_chain,
    make_chain_plus_event,
    make_complete_tree,
    make_double_tree,
    parallel_compose,
    restrict,
    restrict_schedule,
)

__version__ = "0.1.0"
