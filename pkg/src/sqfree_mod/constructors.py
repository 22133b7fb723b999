"""Constructive procedures for square-free words with modular constraints.

The central object is a guided-morphism construction state: a fixed
square-free pre-image together with one guide value in {23,...,26} per
pre-image letter.  Shrinking a guide value from 26 drags every later letter
of the generated word a few positions to the left while touching only a
bounded window of bytes, so a prescribed pattern occurring slightly too far
right can be pulled onto its exact target position without disturbing the
already-frozen prefix.  The two contraction engines below implement that
move for recurrent patterns (the pattern re-occurs densely in plain guide-26
images) and for constructible patterns (some two-image guide window realises
the pattern near its start; that window is spliced in first).

On top of the engines sit the end-to-end builders: palindrome prescription,
the large-coprime-pair builder (both moduli >= 331), the circular-morphism
builder (small modulus, large coprime partner) and the modulus-6 pipeline
driven through the pair-rule completion.  Every builder re-verifies its
output by independent scans before returning it.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from functools import lru_cache

from .core_words import (
    ALPHABET,
    WILDCARD,
    Pattern,
    check_word,
    has_square_ending_at,
    is_squarefree,
    lex_least_squarefree,
    subsequence,
)
from .morphisms import (
    apply as apply_morphism,
    apply_h,
    divergence_offset,
    family_common_affixes,
    is_circular,
    crochemore_test,
    modular_morphism,
    r_complete,
    standard_ruleset,
)
from .recurrence_lab import (
    ConstructibilityCertificate,
    check_constructible,
    constructible_delta16_analytic,
    forbidden_pair_pattern,
    forbidden_triple_pattern,
    gapped_pair_pattern,
    is_excluded_triple,
    two_word_pattern,
)

_PREFIX_KEEP, _SUFFIX_KEEP = family_common_affixes()  # 12 and 9
_SUFFIX_CUT = 26 - _SUFFIX_KEEP  # byte offset where a shrunk image rejoins


class ContractionError(RuntimeError):
    """A certificate-backed construction step failed to land.

    Raised instead of retrying: a miss means a wrong certificate or a bug in
    the placement arithmetic, never bad luck, so the failure must surface
    with its context intact.
    """


# ---------------------------------------------------------------------------
# construction state
# ---------------------------------------------------------------------------

@dataclass
class ConstructionState:
    """A square-free pre-image plus one guide value per pre-image letter.

    The generated word is ``apply_h(base, gamma)``.  ``satisfied_upto`` is
    the byte index up to which all constraints placed so far hold; bytes at
    or before it are never modified again.  Single-owner: drive one state
    from one thread only.
    """

    base: str
    gamma: list[int] = field(repr=False)
    satisfied_upto: int = 0

    def word(self) -> str:
        return apply_h(self.base, self.gamma)

    def image_starts(self) -> list[int]:
        """image_starts()[j] is the byte position where image j begins."""
        starts = [0]
        for g in self.gamma[:-1]:
            starts.append(starts[-1] + g)
        return starts


def fresh_state(capacity: int, first_letter: str | None = None) -> ConstructionState:
    """A state whose generated word has at least ``capacity`` bytes.

    The pre-image is the lexicographically least square-free word (optionally
    pinned to a first letter) and the guide is constant 26.  The pre-image is
    fixed for the lifetime of the state: worst-case shrinkage is 23 bytes per
    image, so the over-provisioning below can never run out mid-build as long
    as callers size ``capacity`` for their full target plus working margin.
    """
    n = capacity // 23 + 8
    base = lex_least_squarefree(n, first=first_letter)
    return ConstructionState(base=base, gamma=[26] * n)


def _image_starts(gamma: list[int]) -> list[int]:
    starts = [0]
    for g in gamma[:-1]:
        starts.append(starts[-1] + g)
    return starts


# ---------------------------------------------------------------------------
# the contraction engines
# ---------------------------------------------------------------------------

def _write_plan(gamma: list[int], starts: list[int], guard: int, target: int,
                slack: int, frozen_from: int | None) -> list[int] | None:
    """Shrink guide values so the word loses exactly ``slack`` bytes.

    The written images must start late enough that their first diverging
    byte lies past ``guard`` and end early enough that the pattern
    occurrence at target+slack sits entirely in the preserved common-suffix
    region.  Returns the new gamma, or None when no placement satisfies both
    sides (the caller then tries the next occurrence).
    """
    shrink3, rem = divmod(slack, 3)
    values = [23] * shrink3 + ([26 - rem] if rem else [])
    k = len(values)
    first_divergence = divergence_offset(values[0])

    c = bisect_right(starts, guard - first_divergence)
    while c + k <= len(gamma):
        blocked = next((j for j in range(k) if gamma[c + j] != 26), None)
        if blocked is None:
            break
        c += blocked + 1
    else:
        return None
    if frozen_from is not None and c + k > frozen_from:
        return None
    # the last modified image rejoins the old bytes 17 bytes into itself;
    # the occurrence must not start before that point
    if starts[c] + 26 * (k - 1) + _SUFFIX_CUT > target + slack:
        return None
    out = list(gamma)
    out[c:c + k] = values
    return out


def _contract(state: ConstructionState, guard: int, target: int,
              pattern: Pattern, max_slack: int,
              splice: ConstructibilityCertificate | None) -> None:
    """Shared engine: land ``pattern`` at ``target`` preserving [0, guard]."""
    before = state.word()
    gamma = list(state.gamma)
    starts = _image_starts(gamma)

    # reset the tail to plain 26 images; safe because a changed image only
    # diverges 12 bytes in, past the guarded prefix
    reset_from = bisect_right(starts, guard - _PREFIX_KEEP)
    for j in range(reset_from, len(gamma)):
        gamma[j] = 26
    starts = _image_starts(gamma)

    frozen_from = None
    if splice is not None:
        k = splice.preimage_length
        anchor = bisect_left(starts, target)
        if anchor + k > len(gamma):
            raise ContractionError(
                f"pre-image capacity exhausted splicing at image {anchor}")
        piece = state.base[anchor:anchor + k]
        witness_gamma, _ = splice.witnesses[piece]
        gamma[anchor:anchor + k] = witness_gamma
        frozen_from = anchor

    word = apply_h(state.base, gamma)
    if len(word) < target + max_slack + pattern.span:
        raise ContractionError(
            f"pre-image capacity exhausted: word has {len(word)} bytes, "
            f"need {target + max_slack + pattern.span}")

    for slack in range(max_slack + 1):
        if not pattern.matches_at(word, target + slack):
            continue
        if slack == 0:
            new_gamma = gamma
        else:
            new_gamma = _write_plan(gamma, starts, guard, target, slack,
                                    frozen_from)
            if new_gamma is None:
                continue
        after = apply_h(state.base, new_gamma)
        if after[:guard + 1] != before[:guard + 1]:
            raise ContractionError(
                f"prefix [0, {guard}] not preserved landing "
                f"{pattern.describe()} at {target} (slack {slack})")
        if not pattern.matches_at(after, target):
            raise ContractionError(
                f"{pattern.describe()} did not land at {target} "
                f"(slack {slack})")
        state.gamma = new_gamma
        state.satisfied_upto = target + pattern.span - 1
        return
    raise ContractionError(
        f"no realizable occurrence of {pattern.describe()} in "
        f"[{target}, {target + max_slack}] with guard {guard}; "
        "the certificate backing this step is wrong or the state is corrupt")


def contract_recurrent(state: ConstructionState, keep_upto: int, target: int,
                       pattern: Pattern, delta: int, protect: int = 0) -> ConstructionState:
    """Land a distance-``delta`` recurrent pattern at exactly ``target``.

    The generated word keeps its bytes on [0, keep_upto+protect]; the pattern
    ends up matching at ``target``.  ``protect`` widens the guarded prefix by
    a few bytes (a previously placed pattern protruding past its own anchor)
    without entering the distance precondition, which is stated on
    ``keep_upto`` alone and is tight for the palindrome chains.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    bound = keep_upto + 4 + 26 * ((delta + 2) // 3)
    if target < bound:
        raise ValueError(
            f"target {target} is below the recurrent-contraction bound "
            f"{bound} for delta={delta}")
    _contract(state, keep_upto + protect, target, pattern, delta, splice=None)
    return state


def contract_constructible(state: ConstructionState, keep_upto: int, target: int,
                           pattern: Pattern, cert: ConstructibilityCertificate,
                           protect: int = 0) -> ConstructionState:
    """Land a constructible pattern at ``target`` via its certificate.

    The certificate's witness guide pair is spliced over the first image
    starting at or past ``target``, which realises the pattern at most
    cert.delta + 25 bytes too far right; the remaining slack is closed with
    the recurrent machinery.
    """
    if not cert.verdict:
        raise ValueError("certificate does not certify constructibility")
    if cert.pattern != pattern:
        raise ValueError("certificate was issued for a different pattern")
    bound = keep_upto + 26 * ((cert.delta + 3) // 3) + 198
    if target < bound:
        raise ValueError(
            f"target {target} is below the constructible-contraction bound "
            f"{bound} for certificate delta={cert.delta}")
    _contract(state, keep_upto + protect, target, pattern, cert.delta + 25,
              splice=cert)
    return state


# ---------------------------------------------------------------------------
# certificates used by the builders, computed once and cached
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _pair_certificate(a: str, b: str, delta: int) -> ConstructibilityCertificate:
    """Constructibility certificate for the pattern a .^delta b."""
    if delta == 3:
        cert = check_constructible(gapped_pair_pattern(a, b, 3), 10, 2)
    elif 9 <= delta <= 15:
        cert = check_constructible(gapped_pair_pattern(a, b, delta), 8, 2)
    elif 16 <= delta <= 45:
        cert = constructible_delta16_analytic(a, b, delta)
    else:
        raise ValueError(f"no constructible route for gap {delta}")
    if not cert:
        raise ContractionError(
            f"expected certificate for {a}.^{delta}.{b} failed to verify")
    return cert


@lru_cache(maxsize=None)
def _triple_certificate(first_forbidden: str, middle: str, last_forbidden: str,
                        delta: int) -> ConstructibilityCertificate:
    """Certificate for an exceptional triple !a .^delta b .^delta !c."""
    pat = forbidden_triple_pattern(first_forbidden, middle, last_forbidden, delta)
    cert = check_constructible(pat, 13, 2)
    if not cert:
        raise ContractionError(
            f"expected certificate for {pat.describe()} failed to verify")
    return cert


# ---------------------------------------------------------------------------
# palindrome prescription
# ---------------------------------------------------------------------------

_PAL = Pattern(members=["010", "020", "101", "121", "202", "212"])
_NONPAL = Pattern(members=["012", "021", "102", "120", "201", "210"])


def prescribe_palindromes(positions, flags, length: int) -> str:
    """A square-free word with w[p] == w[p+2] exactly where flagged.

    ``positions`` is an increasing sequence with consecutive gaps >= 30;
    ``flags[i]`` is True for a palindromic start (w[p]=w[p+2]) and False for
    a non-palindromic one.  The first position is aligned by trimming a
    short prefix off the generated word; later ones are landed by recurrent
    contractions guarding two bytes past the previous anchor.
    """
    positions = list(positions)
    flags = [bool(f) for f in flags]
    if len(positions) != len(flags):
        raise ValueError("positions and flags must have equal length")
    if not positions:
        raise ValueError("need at least one position")
    if positions[0] < 0:
        raise ValueError("positions must be non-negative")
    for x, y in zip(positions, positions[1:]):
        if y - x < 30:
            raise ValueError(f"gap {y - x} between positions {x} and {y} "
                             "is below the minimum of 30")

    capacity = max(length, positions[-1] + 3) + 120
    state = fresh_state(capacity + 10_050)
    word = state.word()

    first = _PAL if flags[0] else _NONPAL
    for trim in range(10_000):
        if first.matches_at(word, trim + positions[0]):
            break
    else:
        raise ContractionError(
            "no alignment offset for the first prescription within the "
            "10000-byte scan cap")
    state.satisfied_upto = trim + positions[0] + 2

    for i in range(1, len(positions)):
        pat = _PAL if flags[i] else _NONPAL
        contract_recurrent(state,
                           keep_upto=trim + positions[i - 1],
                           target=trim + positions[i],
                           pattern=pat,
                           delta=3 if flags[i] else 1,
                           protect=2)

    out = state.word()[trim:trim + length]
    if len(out) < length:
        raise ContractionError("state capacity fell short of the target length")
    if not is_squarefree(out):
        raise ContractionError("output failed the square-freeness scan")
    for pos, flag in zip(positions, flags):
        if pos + 2 < length and (out[pos] == out[pos + 2]) != flag:
            raise ContractionError(f"prescription at position {pos} not met")
    return out


# ---------------------------------------------------------------------------
# offsets of the +-1-congruent multiples between two coprime moduli
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CrtOffsets:
    """Offsets a, b > 0 with 2a + b = q locating the two multiples of p in
    each length-pq window that sit next to a multiple of q."""
    a: int
    b: int


def crt_offsets(p: int, q: int) -> CrtOffsets:
    """For coprime p, q >= 3: the multiples of p congruent to +-1 mod q in
    ]0, pq[ are a*p and (a+b)*p; every later window repeats them shifted by
    multiples of pq."""
    if p < 3 or q < 3:
        raise ValueError("both moduli must be at least 3")
    if math.gcd(p, q) != 1:
        raise ValueError(f"moduli {p} and {q} are not coprime")
    x = pow(p, -1, q)
    s_plus = x * p           # = +1 mod q, lies in ]0, pq[
    s_minus = (q - x) * p    # = -1 mod q
    lo, hi = min(s_plus, s_minus), max(s_plus, s_minus)
    a = lo // p
    b = hi // p - a
    assert 2 * a + b == q and a > 0 and b > 0
    return CrtOffsets(a=a, b=b)


# ---------------------------------------------------------------------------
# backtracking completion of sparse partial words
# ---------------------------------------------------------------------------

def fill_partial_word(v: str) -> str:
    """Complete a partial word ('.' = free) into a square-free word.

    Forced cells must be separated by at least 18 free cells; under that
    density a completion always exists, so search exhaustion is reported as
    an internal failure rather than a normal outcome.  Letters are tried in
    lexicographic order.
    """
    forced = [i for i, ch in enumerate(v) if ch != WILDCARD]
    for i in forced:
        if v[i] not in ALPHABET:
            raise ValueError(f"cell {i} holds {v[i]!r}, not a letter or '.'")
    for x, y in zip(forced, forced[1:]):
        if y - x - 1 < 18:
            raise ValueError(
                f"forced cells at {x} and {y} are separated by {y - x - 1} "
                "free cells; at least 18 are required")

    n = len(v)
    if n == 0:
        return ""
    w: list[str] = []
    pending: list[list[str]] = [_fill_candidates(v, 0)]
    while True:
        if not pending[-1]:
            pending.pop()
            if not pending:
                raise ContractionError(
                    "square-free completion search exhausted; this "
                    "contradicts the density guarantee and signals a bug")
            w.pop()
            continue
        w.append(pending[-1].pop(0))
        if has_square_ending_at(w, len(w) - 1):
            w.pop()
            continue
        if len(w) == n:
            return "".join(w)
        pending.append(_fill_candidates(v, len(w)))


def _fill_candidates(v: str, i: int) -> list[str]:
    return list(ALPHABET) if v[i] == WILDCARD else [v[i]]


# ---------------------------------------------------------------------------
# the modulo-p side word for a large coprime pair
# ---------------------------------------------------------------------------

def _adjacent_index(multiple: int, q: int) -> int:
    """Index into the modulo-q prescription adjacent to a +-1-congruent
    multiple of p (``multiple`` is that multiple, given modulo nothing)."""
    if multiple % q == 1:
        return (multiple - 1) // q
    assert multiple % q == q - 1
    return (multiple + 1) // q


def star_prescription_length(p: int, q: int, length: int) -> int:
    """How many letters of the modulo-q prescription build_star_word reads
    to produce ``length`` cells."""
    segments = (length - 1) // q + 1
    return (segments + 1) * p + 3


def build_star_word(p: int, q: int, s: str, length: int) -> str:
    """The modulo-p subsequence word for the large-pair construction.

    Produces a square-free word of ``length`` cells where cell iq carries
    s[ip] (these cells sit at positions that are multiples of both moduli)
    and the two cells per window adjacent to a multiple of q avoid the
    letter prescribed there, so that the final word can satisfy the
    adjacent-multiples condition.  The build branches on the offset shape:
    both offsets large lets a sparse backtracking fill do the work, a small
    first offset clusters cells into gapped triples, and a small second
    offset clusters them into forbidden pairs.
    """
    if q < 364:
        raise ValueError("the larger modulus must be at least 364")
    if not 3 <= p <= q:
        raise ValueError("need 3 <= p <= q")
    if math.gcd(p, q) != 1:
        raise ValueError(f"moduli {p} and {q} are not coprime")
    if length < 1:
        raise ValueError("length must be positive")

    check_word(s)
    off = crt_offsets(p, q)
    a, b = off.a, off.b
    x = pow(p, -1, q)
    lo, hi = sorted((x * p, (q - x) * p))

    segments = (length - 1) // q + 1
    s_needed = star_prescription_length(p, q, length)
    if len(s) < s_needed:
        raise ValueError(
            f"prescription word too short: need {s_needed} letters for "
            f"length {length}, got {len(s)}")

    def eq_value(i: int) -> str:
        return s[i * p]

    def lo_forbidden(i: int) -> str:
        return s[i * p + _adjacent_index(lo, q)]

    def hi_forbidden(i: int) -> str:
        return s[i * p + _adjacent_index(hi, q)]

    if a >= 19 and b >= 19:
        cells = [WILDCARD] * length
        for i in range(segments):
            if i * q < length:
                cells[i * q] = eq_value(i)
            for cell, banned in ((i * q + a, lo_forbidden(i)),
                                 (i * q + a + b, hi_forbidden(i))):
                if cell < length:
                    cells[cell] = min(set(ALPHABET) - {banned})
        return _verified_star(fill_partial_word("".join(cells)),
                              p, q, s, length, lo, hi)

    if a <= 18:
        # b = q - 2a >= 328: clusters are triples
        #   !hi_forbidden(i) .^{a-1} eq_value(i+1) .^{a-1} !lo_forbidden(i+1)
        # anchored at cell iq+a+b, with quiet stretches of b cells between
        assert b >= 328
        delta = a - 1
        state = fresh_state(length + 10_050 + 2 * a + 120)
        word = state.word()
        banned0 = lo_forbidden(0)
        for trim in range(10_000):
            if word[trim] == s[0] and word[trim + a] != banned0:
                break
        else:
            raise ContractionError(
                "no alignment offset for the first window within the "
                "10000-byte scan cap")
        state.satisfied_upto = trim + a
        i = 0
        while i * q + a + b < length:
            first_f = hi_forbidden(i)
            mid = eq_value(i + 1)
            last_f = lo_forbidden(i + 1)
            pat = forbidden_triple_pattern(first_f, mid, last_f, delta)
            if is_excluded_triple(first_f, mid, last_f, delta):
                contract_constructible(state,
                                       keep_upto=trim + i * q + a,
                                       target=trim + i * q + a + b,
                                       pattern=pat,
                                       cert=_triple_certificate(
                                           first_f, mid, last_f, delta))
            else:
                contract_recurrent(state,
                                   keep_upto=trim + i * q + a,
                                   target=trim + i * q + a + b,
                                   pattern=pat, delta=27)
            i += 1
        out = state.word()[trim:trim + length]
        return _verified_star(out, p, q, s, length, lo, hi)

    # b <= 18, a = (q - b) / 2 >= 173: clusters are forbidden pairs
    #   !lo_forbidden(i) .^{b-1} !hi_forbidden(i)
    # at cell iq+a, with the forced cell iq isolated on both sides
    assert b <= 18 and a >= 173
    delta = b - 1
    state = fresh_state(length + 10_050 + 120)
    word = state.word()
    for trim in range(10_000):
        if word[trim] == s[0]:
            break
    else:
        raise ContractionError(
            "no alignment offset for the first cell within the "
            "10000-byte scan cap")
    state.satisfied_upto = trim
    i = 0
    while i * q + a < length:
        pair = forbidden_pair_pattern(lo_forbidden(i), hi_forbidden(i), delta)
        contract_recurrent(state,
                           keep_upto=trim + i * q,
                           target=trim + i * q + a,
                           pattern=pair, delta=6)
        if (i + 1) * q < length:
            contract_recurrent(state,
                               keep_upto=trim + i * q + a + b,
                               target=trim + (i + 1) * q,
                               pattern=Pattern(members=[eq_value(i + 1)]),
                               delta=3)
        i += 1
    out = state.word()[trim:trim + length]
    return _verified_star(out, p, q, s, length, lo, hi)


def _verified_star(out: str, p: int, q: int, s: str, length: int,
                   lo: int, hi: int) -> str:
    """Independent scan of the star word's contract before returning it."""
    if len(out) < length:
        raise ContractionError("star word fell short of the target length")
    out = out[:length]
    if not is_squarefree(out):
        raise ContractionError("star word failed the square-freeness scan")
    a = lo // p
    ab = hi // p
    for i in range(length // q + 1):
        checks = []
        if i * q < length:
            checks.append(("forced", i * q, s[i * p]))
        if i * q + a < length:
            checks.append(("banned", i * q + a, s[i * p + _adjacent_index(lo, q)]))
        if i * q + ab < length:
            checks.append(("banned", i * q + ab, s[i * p + _adjacent_index(hi, q)]))
        for kind, cell, letter in checks:
            good = out[cell] == letter if kind == "forced" else out[cell] != letter
            if not good:
                raise ContractionError(
                    f"star cell {cell} violates its {kind} constraint")
    return out


# ---------------------------------------------------------------------------
# the full large-coprime-pair construction
# ---------------------------------------------------------------------------

def build_large_pq_word(p: int, q: int, length: int, s: str | None = None) -> str:
    """A square-free word whose subsequences modulo p and modulo q are
    square-free, for coprime p, q >= 331 with max(p, q) >= 364.

    The modulo-max prescription is ``s`` (lexicographically least square-free
    by default); the modulo-min prescription is the star word built from it.
    Both are then stamped into one guided word: isolated constraint positions
    by single-letter recurrent contractions, close pairs of positions (one
    multiple of each modulus) by the gapped-pair machinery matching their
    distance.
    """
    if min(p, q) < 331 or max(p, q) < 364:
        raise ValueError("need p, q >= 331 and max(p, q) >= 364")
    if math.gcd(p, q) != 1:
        raise ValueError(f"moduli {p} and {q} are not coprime")
    if length < 1:
        raise ValueError("length must be positive")

    small, big = min(p, q), max(p, q)
    horizon = length + 70
    star_len = horizon // small + 2
    s_needed = max(horizon // big + 2,
                   star_prescription_length(small, big, star_len)) + 8
    if s is None:
        s = lex_least_squarefree(s_needed)
    elif len(s) < s_needed:
        raise ValueError(f"prescription word too short: need {s_needed} letters")
    elif not is_squarefree(check_word(s)):
        raise ValueError("prescription word is not square-free")

    star = build_star_word(small, big, s, star_len)
    assert star[0] == s[0]

    targets: dict[int, str] = {}
    for j in range(star_len):
        pos = j * small
        if pos < horizon:
            targets[pos] = star[j]
    for i in range(horizon // big + 1):
        pos = i * big
        if pos in targets:
            assert targets[pos] == s[i], "inconsistent prescription at a shared multiple"
        targets[pos] = s[i]
    order = sorted(targets)

    state = fresh_state(length + 700, first_letter=s[0])
    n = 1
    while n < len(order):
        u = order[n]
        if n + 1 < len(order) and order[n + 1] - u <= 29:
            partner = order[n + 1]
            gap = partner - u
            x, y = targets[u], targets[partner]
            keep = order[n - 1]
            if gap == 1:
                assert x != y, "adjacent multiples prescribed equal letters"
                contract_recurrent(state, keep, u,
                                   Pattern(members=[x + y]), delta=12)
            elif gap - 1 in (1, 2, 4, 5, 6, 7, 8):
                contract_recurrent(state, keep, u,
                                   gapped_pair_pattern(x, y, gap - 1), delta=27)
            else:
                contract_constructible(state, keep, u,
                                       gapped_pair_pattern(x, y, gap - 1),
                                       _pair_certificate(x, y, gap - 1))
            n += 2
        else:
            contract_recurrent(state, order[n - 1], u,
                               Pattern(members=[targets[u]]), delta=3)
            n += 1

    out = state.word()[:length]
    if len(out) < length:
        raise ContractionError("state capacity fell short of the target length")
    if not is_squarefree(out):
        raise ContractionError("output failed the square-freeness scan")
    got_small = subsequence(out, small, 0)
    if got_small != star[:len(got_small)]:
        raise ContractionError("modulo-small subsequence deviates from the star word")
    got_big = subsequence(out, big, 0)
    if got_big != s[:len(got_big)]:
        raise ContractionError("modulo-big subsequence deviates from the prescription")
    return out


# ---------------------------------------------------------------------------
# construction through a circular uniform morphism
# ---------------------------------------------------------------------------

def build_from_circular_morphism(g, k: int, p: int, alpha: int, q: int,
                                 t: str, length: int) -> str:
    """A square-free word, square-free modulo p and modulo q, from a
    circular kp-uniform morphism whose images and modular slices both avoid
    squares.

    The result is g(w) shifted by ``alpha``, where the pre-image w is chosen
    so that the positions hit by multiples of q read off ``t``.  Those
    positions land at least 19 pre-image letters apart (q >= 19kp), sparse
    enough for the backtracking completion.
    """
    kp = k * p
    if g.uniform_length() != kp:
        raise ValueError(f"morphism is not {kp}-uniform")
    if not is_circular(g):
        raise ValueError("morphism does not commute with letter rotation")
    base_check = crochemore_test(g)
    if not base_check:
        raise ValueError(
            f"morphism fails the square-freeness criterion on {base_check.witness!r}")
    if not 0 <= alpha < p:
        raise ValueError("need 0 <= alpha < p")
    sliced = modular_morphism(g, alpha, p)
    slice_check = crochemore_test(sliced)
    if not slice_check:
        raise ValueError(
            f"modular slice alpha={alpha} fails the square-freeness "
            f"criterion on {slice_check.witness!r}")
    if q < 19 * kp:
        raise ValueError(f"need q >= 19kp = {19 * kp}")
    if not is_squarefree(check_word(t)):
        raise ValueError("prescription word is not square-free")

    n_targets = (length - 1) // q + 1
    if len(t) < n_targets:
        raise ValueError(f"prescription word too short: need {n_targets} letters")

    pre_len = (length + alpha) // kp + 2
    cells = [WILDCARD] * pre_len
    g0 = g["0"]
    for n in range(n_targets):
        pos = n * q + alpha
        d, r = divmod(pos, kp)
        wanted = str((int(t[n]) - int(g0[r])) % 3)
        assert cells[d] in (WILDCARD, wanted), "colliding pre-image constraints"
        cells[d] = wanted
    w = fill_partial_word("".join(cells))
    out = apply_morphism(g, w)[alpha:alpha + length]

    if len(out) < length:
        raise ContractionError("image fell short of the target length")
    if not is_squarefree(out):
        raise ContractionError("output failed the square-freeness scan")
    got = subsequence(out, q, 0)
    if got != t[:len(got)]:
        raise ContractionError("modulo-q subsequence deviates from the prescription")
    if not is_squarefree(subsequence(out, p, 0)):
        raise ContractionError("modulo-p subsequence is not square-free")
    return out


# ---------------------------------------------------------------------------
# the modulus-6 pipeline
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _completion_rule_pair(offset: int, letter: str) -> tuple[str, str]:
    """The exactly-two length-2 pre-image words whose completion rule has
    ``letter`` at ``offset``."""
    rules = standard_ruleset()
    hits = sorted(u for u, img in rules.items() if img[offset] == letter)
    assert len(hits) == 2, (offset, letter, hits)
    return hits[0], hits[1]


def shift_in_completions(state: ConstructionState, upto: int, target: int,
                         letter: str) -> ConstructionState:
    """Make the rule-completed word carry ``letter`` at ``target`` while
    keeping its bytes through ``upto``.

    Works entirely on the guided pre-image: position ``target`` falls at a
    fixed offset of rule block target//6, and exactly two pre-image factors
    of length 2 put ``letter`` there, so landing that two-word pattern at
    block target//6 suffices.  Rule offsets 0-2 depend only on the block's
    first pre-image letter, which is what makes the guard below exact.
    """
    if target < upto + 341:
        raise ValueError(
            f"target {target} is below the completion-shift bound {upto + 341}")
    offset = target % 6
    block = target // 6
    u, v = _completion_rule_pair(offset, letter)
    keep = upto // 6 + (0 if upto % 6 <= 2 else 1)
    contract_recurrent(state, keep, block, two_word_pattern(u, v), delta=6)
    return state


def build_p6_word(q: int, s: str, t: str, length: int) -> str:
    """A square-free word, square-free modulo 6 and modulo q (q >= 341),
    whose modulo-q subsequence reads off ``s``.

    The word is the rule completion of a guided image of ``t``; each
    multiple of q is steered to its prescribed letter through
    shift_in_completions, and every prefix constraint is re-checked after
    every step.
    """
    if q < 341:
        raise ValueError("the coprime modulus must be at least 341")
    if not s or not t or s[0] != t[0]:
        raise ValueError("prescriptions must agree on their first letter")
    if not is_squarefree(check_word(s)) or not is_squarefree(check_word(t)):
        raise ValueError("prescription words must be square-free")

    n_targets = (length - 1) // q
    if len(s) < n_targets + 1:
        raise ValueError(f"modulo-q prescription too short: need {n_targets + 1}")
    pre_bytes = length // 6 + 90
    if len(t) < pre_bytes // 23 + 4:
        raise ValueError(
            f"pre-image word too short: need {pre_bytes // 23 + 4} letters")

    rules = standard_ruleset()
    state = ConstructionState(base=t, gamma=[26] * len(t))
    for j in range(1, n_targets + 1):
        shift_in_completions(state, upto=(j - 1) * q, target=j * q, letter=s[j])
        # each completed cell reads off one rule byte, so rechecking the whole
        # prefix only touches the pre-image pairs under the multiples of q
        pre = state.word()
        for i in range(j + 1):
            block, offset = divmod(i * q, 6)
            if rules[pre[block:block + 2]][offset] != s[i]:
                raise ContractionError(
                    f"constraint at multiple {i} regressed after step {j}")

    out = r_complete(state.word())[:length]
    if len(out) < length:
        raise ContractionError("completion fell short of the target length")
    if not is_squarefree(out):
        raise ContractionError("output failed the square-freeness scan")
    mod6 = subsequence(out, 6, 0)
    if mod6 != state.word()[:len(mod6)]:
        raise ContractionError("modulo-6 subsequence deviates from the pre-image")
    got = subsequence(out, q, 0)
    if got != s[:len(got)]:
        raise ContractionError("modulo-q subsequence deviates from the prescription")
    return out
