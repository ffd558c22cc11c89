"""Gap-constrained longest increasing paths.

Simulation, exact verification and asymptotics for the maximal length of
increasing paths through planar Poisson or Bernoulli point fields when
successive points of the path must be separated by minimal horizontal and
vertical gaps.  The package couples the gapped models to two classical
ones (plain increasing paths, and last-passage percolation with geometric
weights), solves both sides exactly, and evaluates every limiting constant
and fluctuation scale in closed form or by fixed-point iteration.
"""

from .model import (
    BitField,
    GapPair,
    PointCloud,
    WeightField,
    precedes,
    validate_cloud,
)
from .sampling import SeedSpec, sample_bernoulli, sample_geometric, sample_poisson
from .solvers import (
    PathResult,
    gap_lis_continuous,
    gap_lis_discrete,
    gap_lis_table,
    lis_11_table,
    lpp_geometric,
    lpp_table,
    patience_lis,
)
from .hammersley import (
    LineSet,
    StaircaseLine,
    build_lines_continuous,
    build_lines_discrete,
    count_lines_intersecting,
)
from .couplings import (
    CoupledPair,
    check_distributional_identity,
    clump_to_geometric,
    dilate_continuous,
    dilate_discrete,
    project_psi,
)
from .limits import (
    AlphaBeta,
    FluctuationScale,
    LimitResult,
    TracyWidomTable,
    f_gap_limit,
    f_limit,
    g_gap_limit,
    g_limit,
    regime_limit,
    report_sandwich,
    sigma_gap_continuous,
    sigma_gap_discrete,
    sigma_johansson,
    solve_alpha_beta,
)
from .oracle import (
    ExactDist,
    brute_chains,
    exact_dist_gap_lis,
    exact_dist_lpp,
    verify_gap_vs_lpp,
    verify_gap_vs_unit,
)
from .mc import (
    ExperimentSpec,
    StatReport,
    ks_statistic,
    run_coupling_cdf,
    run_fluct_histogram,
    run_lln,
    run_variance_scaling,
)

__version__ = "0.1.0"
