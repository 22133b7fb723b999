"""Morphisms on ternary words.

Covers plain letter-to-word morphisms (application, uniformity, commutation
with the cyclic letter rotation, the square-freeness criterion via bounded
image checks, derived modular morphisms), the four-image word family driven
by guiding sequences over {23,24,25,26}, and the six-rule pair transducer.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .core_words import ALPHABET, is_squarefree, squarefree_words


def rotate(w: str, steps: int = 1) -> str:
    """Letterwise cyclic rotation: each digit d becomes (d+steps) mod 3."""
    return "".join(ALPHABET[(int(c) + steps) % 3] for c in w)


# ---------------------------------------------------------------------------
# plain morphisms
# ---------------------------------------------------------------------------

class Morphism:
    """A map from letters to words, with optional file-header metadata
    (the header keys k/alpha/p of the bundled morphism files)."""

    __slots__ = ("images", "meta")

    def __init__(self, images: dict, meta: dict | None = None):
        if not images:
            raise ValueError("morphism needs at least one image")
        for a in images:
            if len(a) != 1:
                raise ValueError(f"source letter {a!r} must be a single character")
        self.images = dict(images)
        self.meta = dict(meta) if meta else {}

    def source_alphabet(self) -> str:
        return "".join(sorted(self.images))

    def target_alphabet(self) -> str:
        return "".join(sorted({c for im in self.images.values() for c in im})) or ""

    def uniform_length(self):
        """Common image length if the morphism is uniform, else None."""
        lengths = {len(im) for im in self.images.values()}
        return lengths.pop() if len(lengths) == 1 else None

    def __getitem__(self, letter: str) -> str:
        return self.images[letter]

    def __eq__(self, other):
        return isinstance(other, Morphism) and self.images == other.images

    def __hash__(self):
        return hash(tuple(sorted(self.images.items())))

    def __repr__(self):
        imgs = ", ".join(f"{a}->{im}" for a, im in sorted(self.images.items()))
        return f"Morphism({imgs})"


ROTATION = Morphism({"0": "1", "1": "2", "2": "0"})


def rotation_completed(image0: str, meta: dict | None = None) -> Morphism:
    """Morphism determined by the image of 0, with 1 and 2 obtained by
    rotating it once and twice.  Commutes with the rotation by construction.
    """
    return Morphism(
        {"0": image0, "1": rotate(image0, 1), "2": rotate(image0, 2)},
        meta or {},
    )


def apply(m: Morphism, w: str) -> str:
    """Image of w: the concatenation of letter images, in order."""
    images = m.images
    try:
        return "".join(images[c] for c in w)
    except KeyError as exc:
        raise ValueError(f"letter {exc.args[0]!r} has no image") from None


def is_circular(m: Morphism) -> bool:
    """True iff the morphism commutes with the cyclic letter rotation,
    i.e. image(rot(a)) == rot(image(a)) for every source letter.

    Source and target alphabets must both be the ternary alphabet.
    """
    if m.source_alphabet() != ALPHABET:
        raise ValueError("commutation check needs the full ternary source alphabet")
    if not set(m.target_alphabet()) <= set(ALPHABET):
        raise ValueError("target alphabet must be ternary")
    return all(m[rotate(a)] == rotate(m[a]) for a in ALPHABET)


@dataclass(frozen=True)
class CrochemoreVerdict:
    ok: bool
    witness: str | None
    checked_length: int

    def __bool__(self):
        return self.ok


def crochemore_test(m: Morphism) -> CrochemoreVerdict:
    """Bounded certificate that a morphism preserves square-freeness.

    For uniform morphisms, square-freeness of the images of every square-free
    word of length up to 3 suffices; for arbitrary non-erasing ternary
    morphisms the bound is 5.  Returns a failing pre-image as witness.
    """
    if any(not im for im in m.images.values()):
        raise ValueError("erasing morphisms are outside the criterion")
    if m.uniform_length() is not None:
        bound = 3
    elif m.source_alphabet() == ALPHABET:
        bound = 5
    else:
        raise ValueError("need a uniform or full-ternary-source morphism")
    alphabet = m.source_alphabet()
    for n in range(1, bound + 1):
        for t in squarefree_words(n, alphabet=alphabet):
            if not is_squarefree(apply(m, t)):
                return CrochemoreVerdict(False, t, bound)
    return CrochemoreVerdict(True, None, bound)


def modular_morphism(m: Morphism, alpha: int, p: int) -> Morphism:
    """The morphism sending a to every p-th letter of image(a) after
    dropping the first alpha letters.

    Requires image length divisible by p and alpha < p; the result is then
    (length/p)-uniform and applying it to any word t gives exactly the mod-p
    subsequence of the alpha-shift of apply(m, t).
    """
    kp = m.uniform_length()
    if kp is None:
        raise ValueError("modular morphism needs a uniform base morphism")
    if p <= 0 or kp % p != 0:
        raise ValueError(f"image length {kp} is not a multiple of p={p}")
    if not 0 <= alpha < p:
        raise ValueError(f"need 0 <= alpha < p, got alpha={alpha}, p={p}")
    images = {a: im[alpha::p] for a, im in m.images.items()}
    meta = dict(m.meta)
    meta.update(derived_from_alpha=alpha, derived_from_p=p)
    return Morphism(images, meta)


# ---------------------------------------------------------------------------
# morphism files
# ---------------------------------------------------------------------------

def parse_morphism(text: str) -> Morphism:
    """Parse the plain-text format: optional 'key=value' header lines
    (k, alpha, p, ...) followed by 'LETTER -> WORD' image lines."""
    images = {}
    meta = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "->" in line:
            left, _, right = line.partition("->")
            letter, image = left.strip(), right.strip()
            if len(letter) != 1:
                raise ValueError(f"bad image line {raw!r}")
            images[letter] = image
        elif "=" in line:
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            meta[key] = int(value) if value.lstrip("-").isdigit() else value
        else:
            raise ValueError(f"unparseable line {raw!r}")
    if not images:
        raise ValueError("no image lines found")
    return Morphism(images, meta)


def load_morphism(path) -> Morphism:
    with open(path, "r", encoding="ascii") as fh:
        return parse_morphism(fh.read())


def bundled_morphism(p: int, data_dir=None) -> Morphism:
    """The shipped uniform-morphism certificate for modulus ``p``.

    ``data_dir`` overrides the package data directory (it must contain a
    ``morphisms/`` subdirectory in the same plain-text format).  Raises
    FileNotFoundError when no certificate is bundled for ``p``.
    """
    name = f"p{p}.txt"
    if data_dir is not None:
        return load_morphism(os.path.join(data_dir, "morphisms", name))
    ref = resources.files("sqfree_mod").joinpath("data", "morphisms", name)
    if not ref.is_file():
        raise FileNotFoundError(f"no bundled morphism for p={p}")
    return parse_morphism(ref.read_text(encoding="ascii"))


def dump_morphism(m: Morphism) -> str:
    lines = [f"{k}={v}" for k, v in sorted(m.meta.items())]
    lines += [f"{a} -> {im}" for a, im in sorted(m.images.items())]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# the four-image family driven by guiding sequences
# ---------------------------------------------------------------------------

GUIDE_VALUES = (23, 24, 25, 26)

_H_PREFIX = "012102120210"
_H_MIDDLE = {23: "12", 24: "201", 25: "2012", 26: "20121"}
_H_SUFFIX = "021201210"


@lru_cache(maxsize=None)
def h_image(a: str, gamma: int) -> str:
    """Image of letter a under the family member of length gamma."""
    if gamma not in _H_MIDDLE:
        raise ValueError(f"gamma must be one of {GUIDE_VALUES}, got {gamma}")
    if a not in ALPHABET:
        raise ValueError(f"bad letter {a!r}")
    base = _H_PREFIX + _H_MIDDLE[gamma] + _H_SUFFIX
    return rotate(base, int(a))


def family_common_affixes() -> tuple[int, int]:
    """Length of the longest prefix and suffix shared by all four images of
    the same letter (the same for every letter, by rotation)."""
    images = [h_image("0", g) for g in GUIDE_VALUES]
    lcp = 0
    while all(len(im) > lcp and im[lcp] == images[0][lcp] for im in images):
        lcp += 1
    lcs = 0
    while all(len(im) > lcs and im[-1 - lcs] == images[0][-1 - lcs] for im in images):
        lcs += 1
    return lcp, lcs


def divergence_offset(gamma: int) -> int:
    """First index at which the length-gamma image differs from the
    length-26 image of the same letter."""
    a, b = h_image("0", gamma), h_image("0", 26)
    i = 0
    while i < min(len(a), len(b)) and a[i] == b[i]:
        i += 1
    return i


def apply_h(t: str, gamma_seq) -> str:
    """Concatenate the guided images h_{gamma_i}(t_i)."""
    if len(gamma_seq) < len(t):
        raise ValueError(
            f"guiding sequence of length {len(gamma_seq)} is shorter than the word ({len(t)})"
        )
    return "".join(h_image(c, g) for c, g in zip(t, gamma_seq))


def h26_morphism() -> Morphism:
    """The constant-26 member of the family as a plain uniform morphism."""
    return Morphism({a: h_image(a, 26) for a in ALPHABET})


def enumerate_h26_factors(L: int) -> frozenset:
    """Every length-L factor arising in images of square-free words under
    the constant-26 member.

    The pre-image length starts at ceil(L/26)+2 and grows until the factor
    set is stable (saturation), so the result is self-certifying rather than
    trusting a fixed constant.
    """
    if not 1 <= L <= 120:
        raise ValueError(f"factor length {L} outside the supported range 1..120")

    def factors(n: int) -> frozenset:
        out = set()
        for t in squarefree_words(n):
            img = apply_h(t, [26] * n)
            out.update(img[i:i + L] for i in range(len(img) - L + 1))
        return frozenset(out)

    n = -(-L // 26) + 2
    current = factors(n)
    for extra in range(1, 4):
        nxt = factors(n + extra)
        if nxt == current:
            return current
        current = nxt
    raise RuntimeError(f"factor set did not saturate by pre-image length {n + 3}")


# ---------------------------------------------------------------------------
# the six-rule pair transducer
# ---------------------------------------------------------------------------

_RULES = {
    "01": "012102",
    "02": "012021",
    "10": "120102",
    "12": "120210",
    "20": "201021",
    "21": "201210",
}


def standard_ruleset() -> dict:
    """The six length-6 rules, one per ordered pair of distinct letters.

    Each rule starts with the pair's first letter, and rule+second-letter is
    square-free; both facts are asserted here.
    """
    for pair, rule in _RULES.items():
        assert len(rule) == 6 and rule[0] == pair[0]
        assert is_squarefree(rule + pair[1])
    return dict(_RULES)


def r_complete(t: str, rules: dict | None = None) -> str:
    """Concatenate the rules of adjacent letter pairs of t.

    The output has length 6(|t|-1), and its subsequence at every 6th position
    reproduces t without its last letter.
    """
    if len(t) < 2:
        raise ValueError("need a word of length at least 2")
    if not is_squarefree(t):
        raise ValueError("the pre-image must be square-free")
    rules = _RULES if rules is None else rules
    try:
        return "".join(rules[t[i:i + 2]] for i in range(len(t) - 1))
    except KeyError as exc:
        raise ValueError(f"no rule for adjacent pair {exc.args[0]!r}") from None
