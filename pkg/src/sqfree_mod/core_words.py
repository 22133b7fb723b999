"""Fundamental word types and predicates over the ternary alphabet.

Words are plain Python strings over "012" (ASCII digits, one word per line in
files).  Partial words use '.' for the wildcard cell.  Everything here is a
pure function; the heavier square-detection routine dispatches between a
direct incremental scan (short words) and a divide-and-conquer repetition
search (long words), both cross-validated in the test suite against a cubic
oracle.
"""

from __future__ import annotations

from itertools import product

ALPHABET = "012"
WILDCARD = "."


def check_word(w: str, alphabet: str = ALPHABET) -> str:
    """Validate that every letter of w belongs to the alphabet."""
    for ch in w:
        if ch not in alphabet:
            raise ValueError(f"letter {ch!r} outside alphabet {alphabet!r}")
    return w


# ---------------------------------------------------------------------------
# square detection
# ---------------------------------------------------------------------------

def has_square_ending_at(w, i: int) -> bool:
    """True iff some square (factor uu, u non-empty) ends exactly at index i.

    Incremental primitive for search: after appending a letter at index i,
    only squares ending at i are new.  Each period is rejected at the first
    mismatched pair, scanning from the appended letter backwards.
    """
    for period in range(1, (i + 1) // 2 + 1):
        if w[i] != w[i - period]:
            continue
        j = i - 1
        lo = i - period + 1
        while j >= lo:
            if w[j] != w[j - period]:
                break
            j -= 1
        else:
            return True
    return False


def _z_function(s) -> list[int]:
    n = len(s)
    z = [0] * n
    if n:
        z[0] = n
    l = r = 0
    for i in range(1, n):
        zi = 0
        if i < r:
            zi = min(r - i, z[i - l])
        while i + zi < n and s[zi] == s[i + zi]:
            zi += 1
        z[i] = zi
        if i + zi > r:
            l, r = i, i + zi
    return z


def _has_square_ml(s) -> bool:
    """Main-Lorentz style divide-and-conquer square existence test."""
    n = len(s)
    if n < 2:
        return False
    if n <= 64:
        for i in range(1, n):
            if has_square_ending_at(s, i):
                return True
        return False
    m = n // 2
    u, v = s[:m], s[m:]
    if _has_square_ml(u) or _has_square_ml(v):
        return True
    ru = u[::-1]
    rs = s[::-1]
    z1 = _z_function(ru)
    z2 = _z_function(v)
    z3 = _z_function(v + "\x00" + s)
    z4 = _z_function(ru + "\x00" + rs)
    lu, lv = m, n - m
    # squares whose centre lies at or left of the split point
    for period in range(1, lu + 1):
        k1 = z1[period] if period < lu else 0
        k2 = z3[lv + 1 + m - period]
        if k1 + k2 >= period:
            return True
    # squares whose centre lies right of the split point
    for period in range(1, lv):
        k2 = z2[period]
        k1 = z4[lu + 1 + n - m - period]
        if k1 + k2 >= period:
            return True
    return False


def is_squarefree(w) -> bool:
    """True iff no factor of w is a square uu with u non-empty."""
    n = len(w)
    if n < 2:
        return True
    if n <= 512:
        for i in range(1, n):
            if has_square_ending_at(w, i):
                return False
        return True
    return not _has_square_ml(w if isinstance(w, str) else "".join(w))


# ---------------------------------------------------------------------------
# subsequences modulo p
# ---------------------------------------------------------------------------

def subsequence(w: str, p: int, alpha: int = 0) -> str:
    """Letters of w at positions alpha, alpha+p, alpha+2p, ...

    alpha must be smaller than p.
    """
    if p <= 0:
        raise ValueError("modulus p must be positive")
    if not 0 <= alpha < p:
        raise ValueError(f"offset alpha={alpha} must satisfy 0 <= alpha < p={p}")
    return w[alpha::p]


def satisfies_star(w: str, p: int, q: int) -> bool:
    """Check the adjacency condition tied to the two moduli.

    Whenever i is a multiple of p and i+1 a multiple of q (or the other way
    round), the letters at i and i+1 must differ.  Vacuously true for indices
    past the end of w.
    """
    n = len(w)
    for i in range(n - 1):
        trig = (i % p == 0 and (i + 1) % q == 0) or (i % q == 0 and (i + 1) % p == 0)
        if trig and w[i] == w[i + 1]:
            return False
    return True


# ---------------------------------------------------------------------------
# patterns
# ---------------------------------------------------------------------------

_MATERIALIZE_LIMIT = 10_000


class Pattern:
    """A finite set of words; it occurs at position i of w when some member
    matches w there.

    Two representations: an explicit member set, or a constraint form -- a
    list of (allowed-letter-set, gap) cells standing for A0 <gap0 wildcards>
    A1 <gap1 wildcards> ...  Constraint patterns above 10^4 members are never
    materialized; membership is tested positionally.
    """

    __slots__ = ("_members", "cells", "alphabet", "span", "_min_len")

    def __init__(self, members=None, cells=None, alphabet: str = ALPHABET):
        self.alphabet = alphabet
        if (members is None) == (cells is None):
            raise ValueError("give exactly one of members/cells")
        if members is not None:
            members = tuple(sorted(set(members)))
            if not members or any(not m for m in members):
                raise ValueError("pattern members must be non-empty words")
            self._members = members
            self.cells = None
            self.span = max(len(m) for m in members)
            self._min_len = min(len(m) for m in members)
        else:
            norm = []
            for letters, gap in cells:
                letters = frozenset(letters)
                if not letters or not letters <= set(alphabet):
                    raise ValueError(f"bad letter-set {sorted(letters)!r}")
                if gap < 0:
                    raise ValueError("negative gap")
                norm.append((letters, int(gap)))
            if not norm:
                raise ValueError("empty constraint list")
            self.cells = tuple(norm)
            self._members = None
            self.span = len(norm) + sum(g for _, g in norm[:-1])
            self._min_len = self.span

    # -- construction helpers ------------------------------------------------

    def member_count(self) -> int:
        if self._members is not None:
            return len(self._members)
        count = 1
        for i, (letters, gap) in enumerate(self.cells):
            count *= len(letters)
            if i < len(self.cells) - 1:
                count *= len(self.alphabet) ** gap
        return count

    def members(self):
        """Explicit member tuple; refuses to materialize huge patterns."""
        if self._members is not None:
            return self._members
        if self.member_count() > _MATERIALIZE_LIMIT:
            raise ValueError(
                f"pattern has {self.member_count()} members; "
                f"limit for materialization is {_MATERIALIZE_LIMIT}"
            )
        words = [""]
        for i, (letters, gap) in enumerate(self.cells):
            step = [w + c for w in words for c in sorted(letters)]
            if i < len(self.cells) - 1:
                for _ in range(gap):
                    step = [w + c for w in step for c in self.alphabet]
            words = step
        return tuple(sorted(words))

    # -- matching -------------------------------------------------------------

    def matches_at(self, w, i: int) -> bool:
        if i < 0:
            return False
        if self.cells is not None:
            if i + self.span > len(w):
                return False
            pos = i
            for letters, gap in self.cells:
                if w[pos] not in letters:
                    return False
                pos += gap + 1
            return True
        for m in self._members:
            if i + len(m) <= len(w) and w[i:i + len(m)] == m:
                return True
        return False

    def first_occurrence(self, w, start: int = 0):
        """Smallest j >= start where the pattern occurs, or None."""
        last = len(w) - self._min_len
        for j in range(max(start, 0), last + 1):
            if self.matches_at(w, j):
                return j
        return None

    # -- plumbing --------------------------------------------------------------

    def describe(self) -> str:
        if self.cells is not None:
            out = []
            for i, (letters, gap) in enumerate(self.cells):
                s = "".join(sorted(letters))
                out.append(s if len(s) == 1 else f"[{s}]")
                if i < len(self.cells) - 1 and gap:
                    out.append(f".{{{gap}}}")
            return "".join(out)
        shown = ",".join(self._members[:8])
        more = "" if len(self._members) <= 8 else ",..."
        return "{" + shown + more + "}"

    def _key(self):
        return (self._members, self.cells, self.alphabet)

    def __eq__(self, other):
        return isinstance(other, Pattern) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"Pattern({self.describe()})"


def make_constraint_pattern(spec, alphabet: str = ALPHABET) -> Pattern:
    """Expand the cell notation A0 <gap> A1 <gap> ... into a Pattern.

    spec is a list of (letters, gap_after) items; letters may be a string or
    any iterable of letters; the final gap is ignored.
    """
    return Pattern(cells=[(set(letters), gap) for letters, gap in spec], alphabet=alphabet)


def pattern_first_occurrence(w: str, pattern: Pattern, start: int = 0):
    """Module-level convenience wrapper around Pattern.first_occurrence."""
    return pattern.first_occurrence(w, start)


# ---------------------------------------------------------------------------
# partial words
# ---------------------------------------------------------------------------

def is_compatible(w: str, v: str) -> bool:
    """True iff |w| <= |v| and w agrees with v on every non-wildcard cell."""
    if len(w) > len(v):
        return False
    for a, b in zip(w, v):
        if b != WILDCARD and a != b:
            return False
    return True


# ---------------------------------------------------------------------------
# Pansiot codes and small-word statistics
# ---------------------------------------------------------------------------

def pansiot_code(w: str) -> str:
    """Binary code of a square-free word: bit i is 1 iff w[i] == w[i+2]."""
    if len(w) < 3:
        raise ValueError("Pansiot code needs a word of length at least 3")
    if not is_squarefree(w):
        raise ValueError("Pansiot code is defined on square-free words")
    return "".join("1" if w[i] == w[i + 2] else "0" for i in range(len(w) - 2))


def distinct_factor_count(w: str, length: int) -> int:
    """Number of distinct factors of the given length."""
    if length <= 0:
        raise ValueError("factor length must be positive")
    if length > len(w):
        raise ValueError("factor length exceeds the word")
    return len({w[i:i + length] for i in range(len(w) - length + 1)})


# ---------------------------------------------------------------------------
# square-free enumeration / generation
# ---------------------------------------------------------------------------

def squarefree_words(n: int, alphabet: str = ALPHABET, prefix: str = ""):
    """Yield all square-free words of length n with the given prefix, in
    lexicographic order."""
    if len(prefix) > n or not is_squarefree(prefix):
        return
    stack = [prefix]
    while stack:
        w = stack.pop()
        if len(w) == n:
            yield w
            continue
        for ch in reversed(alphabet):
            ext = w + ch
            if not has_square_ending_at(ext, len(ext) - 1):
                stack.append(ext)


def lex_least_squarefree(n: int, first: str | None = None) -> str:
    """The lexicographically least square-free word of length n, optionally
    among those starting with the given letter.  DFS with smallest letter
    first; backtracks past greedy dead ends."""
    start = first if first is not None else ""
    for w in squarefree_words(n, prefix=start):
        return w
    raise ValueError(f"no square-free word of length {n} with prefix {start!r}")
