"""Codings of points in overlapping self-similar sets.

Modules: ``symbolic`` (words and Champernowne-type blocks), ``ifs`` (the
model and its parameter regions), ``greedy`` (quasi-greedy codings),
``spectrum`` (Z_n(q), gaps, Pisot checks) and ``universal`` (universal
coding constructors, Caratheodory simplices, thresholds).
"""

from .errors import (
    BudgetExhausted,
    CodingError,
    NoSuccessorError,
    PreconditionError,
    VerificationError,
)
from .greedy import GreedyTrace, coding_stream, drive_to_corner, quasi_greedy_step
from .ifs import (
    FixedPointSet,
    HullCertificate,
    IfsModel,
    Membership,
    affine_independence,
    cycle_fixed_point,
    forward_map,
    hull_condition,
    hull_membership,
    inverse_map,
    load_model,
    m_k_lower_bound,
    p_k_membership,
    project,
    w_block_nondegeneracy,
)
from .spectrum import (
    GapStats,
    PisotCandidate,
    SpectrumSet,
    enumerate_spectrum,
    epsilon_dense_check,
    feng_regime,
    gap_stats,
    is_pisot,
    z_lattice,
)
from .symbolic import (
    Alphabet,
    ChampernowneBlocks,
    FrequencyTable,
    Word,
    block_frequency,
    champernowne_blocks,
    champernowne_stream,
    count_block_occurrences,
    k_normal_defect,
    lex_words,
    verify_missing_zeros,
    word_predecessor,
    word_successor,
)
from .universal import (
    CaratheodorySimplex,
    UniversalCertificate,
    all_words,
    caratheodory_decompose,
    chain_universal,
    interior_simplex_locate,
    thresholds,
    universal_coding_prefix,
    universal_digit_block,
    verify_certificate,
)

__version__ = "0.1.0"
