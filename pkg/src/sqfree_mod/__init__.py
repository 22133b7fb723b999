"""Square-free ternary words with square-free arithmetic subsequences.

The package builds and verifies infinite ternary square-free words w such
that the subsequences w[0], w[p], w[2p], ... and w[0], w[q], w[2q], ... are
square-free as well, and proves impossibility for the pairs (p, q) where no
such word exists.
"""

from __future__ import annotations

from .core_words import (
    ALPHABET,
    Pattern,
    distinct_factor_count,
    has_square_ending_at,
    is_compatible,
    is_squarefree,
    lex_least_squarefree,
    make_constraint_pattern,
    pansiot_code,
    pattern_first_occurrence,
    satisfies_star,
    squarefree_words,
    subsequence,
)
from .morphisms import (
    Morphism,
    apply_h,
    bundled_morphism,
    crochemore_test,
    h_image,
    is_circular,
    load_morphism,
    modular_morphism,
    parse_morphism,
    r_complete,
)
from .recurrence_lab import (
    check_constructible,
    check_recurrent,
    min_recurrence_delta,
    reproduce_lemma_constants,
)
from .constructors import (
    ConstructionState,
    ContractionError,
    build_from_circular_morphism,
    build_large_pq_word,
    build_p6_word,
    build_star_word,
    contract_constructible,
    contract_recurrent,
    crt_offsets,
    fill_partial_word,
    fresh_state,
    prescribe_palindromes,
)
from .search import (
    LIMIT_REACHED,
    TERMINATED,
    CountReport,
    MorphismCertificate,
    PairReport,
    ReductionRecord,
    SearchOutcome,
    backtrack,
    classify_pair,
    count_words,
    mine_pansiot,
    reduce_noncoprime,
    verify_positive_morphism,
)

__version__ = "1.0.0"
