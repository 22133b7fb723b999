from __future__ import annotations

import random
from importlib import resources

import pytest

from sqfree_mod.core_words import is_squarefree, squarefree_words, subsequence
from sqfree_mod.morphisms import (
    GUIDE_VALUES,
    ROTATION,
    CrochemoreVerdict,
    Morphism,
    apply,
    apply_h,
    crochemore_test,
    divergence_offset,
    dump_morphism,
    enumerate_h26_factors,
    family_common_affixes,
    h26_morphism,
    h_image,
    is_circular,
    load_morphism,
    modular_morphism,
    parse_morphism,
    r_complete,
    rotate,
    rotation_completed,
    standard_ruleset,
)
from conftest import naive_is_squarefree


def data_path(*parts):
    return resources.files("sqfree_mod").joinpath("data", *parts)


# ---------------------------------------------------------------------------
# plain morphisms
# ---------------------------------------------------------------------------

def test_rotation_morphism():
    assert apply(ROTATION, "012") == "120"
    assert apply(ROTATION, "") == ""
    assert rotate("012", 2) == "201"
    assert is_circular(ROTATION)


def test_apply_rejects_unknown_letter():
    with pytest.raises(ValueError):
        apply(ROTATION, "013")


def test_is_circular():
    assert is_circular(rotation_completed("0121"))
    const = Morphism({"0": "0", "1": "0", "2": "0"})
    assert not is_circular(const)
    with pytest.raises(ValueError):
        is_circular(Morphism({"0": "01", "1": "10"}))


def test_crochemore_identity_and_tiny_failures():
    ident = Morphism({"0": "0", "1": "1", "2": "2"})
    assert crochemore_test(ident).ok
    bad = Morphism({"0": "0", "1": "0", "2": "2"})
    verdict = crochemore_test(bad)
    assert not verdict.ok
    assert verdict.witness == "01"
    with pytest.raises(ValueError):
        crochemore_test(Morphism({"0": "", "1": "1", "2": "2"}))


def brute_preserves_squarefreeness(m, up_to=12):
    for n in range(1, up_to + 1):
        for t in squarefree_words(n, alphabet=m.source_alphabet()):
            if not is_squarefree(apply(m, t)):
                return False
    return True


def test_crochemore_agrees_with_brute_force_on_random_uniform():
    rng = random.Random(2024)
    tested = 0
    while tested < 50:
        k = rng.randrange(1, 9)
        m = Morphism({a: "".join(rng.choice("012") for _ in range(k)) for a in "012"})
        assert crochemore_test(m).ok == brute_preserves_squarefreeness(m, up_to=8)
        tested += 1


def test_modular_morphism_properties():
    g = rotation_completed(h_image("0", 26) + h_image("0", 26)[:26])
    # 52-letter images: 13*4-uniform among others; use p=4, alpha=2
    gm = modular_morphism(g, 2, 4)
    assert gm.uniform_length() == 13
    rng = random.Random(5)
    for _ in range(100):
        t = "".join(rng.choice("012") for _ in range(20))
        assert apply(gm, t) == subsequence(apply(g, t)[2:], 4, 0)
    with pytest.raises(ValueError):
        modular_morphism(g, 4, 4)
    with pytest.raises(ValueError):
        modular_morphism(g, 0, 5)  # 52 not divisible by 5


def test_modular_morphism_p1_is_identity_map():
    g = rotation_completed("012102")
    gm = modular_morphism(g, 0, 1)
    assert gm.images == g.images


# ---------------------------------------------------------------------------
# morphism files
# ---------------------------------------------------------------------------

def test_parse_and_dump_roundtrip():
    text = "k=13\nalpha=0\np=5\n0 -> 012\n1 -> 120\n2 -> 201\n"
    m = parse_morphism(text)
    assert m.meta == {"k": 13, "alpha": 0, "p": 5}
    assert m["1"] == "120"
    assert parse_morphism(dump_morphism(m)) == m
    with pytest.raises(ValueError):
        parse_morphism("junk line\n")
    with pytest.raises(ValueError):
        parse_morphism("k=3\n")  # no images


TABLE_ROWS = {
    3: (18, 1), 4: (17, 0), 5: (13, 0), 7: (13, 0), 8: (13, 0), 9: (13, 0),
    10: (13, 0), 11: (13, 0), 12: (13, 0), 14: (13, 0), 15: (13, 0),
    16: (13, 0), 20: (13, 0), 21: (13, 0), 22: (13, 0),
}


def test_bundled_morphisms_all_certify():
    for p, (k, alpha) in TABLE_ROWS.items():
        m = load_morphism(data_path("morphisms", f"p{p}.txt"))
        assert m.meta["p"] == p and m.meta["k"] == k and m.meta["alpha"] == alpha
        assert m.uniform_length() == k * p
        assert is_circular(m)
        assert is_squarefree(m["0"])
        assert crochemore_test(m).ok
        derived = modular_morphism(m, alpha, p)
        assert derived.uniform_length() == k
        assert crochemore_test(derived).ok


def test_bundled_p3_image_spot_check():
    m = load_morphism(data_path("morphisms", "p3.txt"))
    assert apply(m, "0") == (
        "012021201210201021012102012021012102120102012102120210"
    )
    assert len(apply(m, "0")) == 54


# ---------------------------------------------------------------------------
# the guided four-image family
# ---------------------------------------------------------------------------

def test_h_image_frozen_words():
    assert h_image("0", 23) == "01210212021012021201210"
    assert h_image("0", 26) == "01210212021020121021201210"
    assert h_image("1", 23) == rotate(h_image("0", 23))
    assert h_image("2", 25) == rotate(h_image("0", 25), 2)
    for g in GUIDE_VALUES:
        for a in "012":
            assert len(h_image(a, g)) == g
            assert is_squarefree(h_image(a, g))
    with pytest.raises(ValueError):
        h_image("0", 22)
    with pytest.raises(ValueError):
        h_image("3", 23)


def test_family_common_affixes_exact():
    assert family_common_affixes() == (12, 9)


def test_divergence_offsets():
    assert divergence_offset(23) == 12
    assert divergence_offset(24) == 15
    assert divergence_offset(25) == 16
    assert divergence_offset(26) == 26


def test_apply_h_basics():
    assert apply_h("0", [23]) == h_image("0", 23)
    w = apply_h("01", [26, 26])
    assert len(w) == 52 and is_squarefree(w)
    with pytest.raises(ValueError):
        apply_h("012", [23, 24])


def test_apply_h_preserves_squarefreeness_exhaustive_small():
    # every square-free pre-image of length <= 4 under every guiding sequence
    from itertools import product
    for n in range(1, 5):
        for t in squarefree_words(n):
            for gs in product(GUIDE_VALUES, repeat=n):
                assert is_squarefree(apply_h(t, gs)), (t, gs)


def test_apply_h_preserves_squarefreeness_length6_sampled_gammas():
    # length-6 pre-images with a randomized subset of the 4^6 guides
    rng = random.Random(99)
    words6 = list(squarefree_words(6))
    for t in words6:
        for _ in range(12):
            gs = [rng.choice(GUIDE_VALUES) for _ in range(6)]
            assert is_squarefree(apply_h(t, gs)), (t, gs)


def test_h26_morphism_certifies():
    m = h26_morphism()
    assert m.uniform_length() == 26
    assert is_circular(m)
    assert crochemore_test(m).ok


def test_enumerate_h26_factors():
    assert enumerate_h26_factors(1) == frozenset({"0", "1", "2"})
    f30 = enumerate_h26_factors(30)
    assert all(len(f) == 30 for f in f30)
    assert all(is_squarefree(f) for f in f30)
    with pytest.raises(ValueError):
        enumerate_h26_factors(0)
    with pytest.raises(ValueError):
        enumerate_h26_factors(121)


# ---------------------------------------------------------------------------
# the pair transducer
# ---------------------------------------------------------------------------

def test_standard_ruleset_invariants():
    rules = standard_ruleset()
    assert len(rules) == 6
    assert set(rules) == {"01", "02", "10", "12", "20", "21"}


def test_r_complete_examples():
    assert r_complete("01") == "012102"
    assert r_complete("012") == "012102120210"
    with pytest.raises(ValueError):
        r_complete("0")
    with pytest.raises(ValueError):
        r_complete("00")
    with pytest.raises(ValueError):
        r_complete("033")


def test_r_complete_modular_readback():
    for n in range(2, 9):
        for t in squarefree_words(n):
            w = r_complete(t)
            assert len(w) == 6 * (n - 1)
            assert subsequence(w, 6, 0) == t[:-1]


def test_r_complete_preserves_squarefreeness_exhaustive():
    for n in range(2, 13):
        for t in squarefree_words(n):
            assert is_squarefree(r_complete(t)), t


def test_bundled_p6_proof_words():
    lines = [
        ln for ln in data_path("p6_proof_words.txt").read_text().splitlines()
        if ln and not ln.startswith("#")
    ]
    assert len(lines) == 6
    for w in lines:
        assert len(w) == 19 and is_squarefree(w)
        for delta in range(1, 10):
            for d in range(0, 6):
                nchk = min(delta, 5)
                assert w[d:d + nchk] != w[d + delta:d + delta + nchk]
