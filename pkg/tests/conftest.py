"""Shared oracles for the test suite.

These are deliberately naive reference implementations, independent of the
package internals, used to cross-validate the optimized code.
"""

from __future__ import annotations

from itertools import product

import pytest


def naive_is_squarefree(w: str) -> bool:
    """Cubic-time oracle: try every factor start and every period."""
    n = len(w)
    for i in range(n):
        for period in range(1, (n - i) // 2 + 1):
            if w[i:i + period] == w[i + period:i + 2 * period]:
                return False
    return True


def all_words(n: int, alphabet: str = "012"):
    for tup in product(alphabet, repeat=n):
        yield "".join(tup)


def naive_squarefree_words(n: int, alphabet: str = "012"):
    return [w for w in all_words(n, alphabet) if naive_is_squarefree(w)]


@pytest.fixture(scope="session")
def squarefree_up_to_7():
    """All ternary square-free words of each length 0..7, by brute force."""
    return {n: naive_squarefree_words(n) for n in range(8)}
