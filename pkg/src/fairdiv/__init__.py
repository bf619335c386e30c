"""Exact fair division of indivisible goods with stability audits."""

from .allocators import AllocatorId, draft_allocate, leximin_allocate, mnw_allocate, modified_wrap, run_allocator
from .errors import BudgetExceeded, FairDivError, InstanceError, ParseError
from .fairness import (
    FairnessVerdict,
    check_beta_po,
    check_ef1,
    check_efx,
    check_pmms_definition,
    check_pmms_rank,
    check_po,
    pair_maximin_value,
)
from .model import (
    Allocation,
    Instance,
    ValidationReport,
    bundle_value,
    dump_instance,
    enumerate_allocations,
    goods_of,
    make_instance,
    mask_of,
    parse_instance,
    validate,
)
from .ranks import (
    Ordering,
    RankTable,
    RankVector,
    build_rank_table,
    rank,
    rank_leximin_allocate,
    rank_leximin_cmp,
    rank_tables,
    rank_vector,
)
from .stability import (
    NeighborSpec,
    StabilityReport,
    audit_stability,
    check_equiv_stability,
    enumerate_neighbors,
    generate_equivalent,
    is_ordinally_equivalent,
)

__version__ = "0.1.0"
