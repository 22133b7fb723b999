from __future__ import annotations

import pytest

from sqfree_mod.core_words import Pattern, is_squarefree, lex_least_squarefree
from sqfree_mod.morphisms import apply_h, h26_morphism, apply as m_apply
from sqfree_mod.recurrence_lab import (
    LEMMA_FAMILIES,
    NONPALINDROME_STARTS,
    PALINDROME_STARTS,
    check_constructible,
    check_recurrent,
    constructible_delta16_analytic,
    forbidden_pair_pattern,
    forbidden_triple_pattern,
    gapped_pair_pattern,
    min_recurrence_delta,
    p_bad_catalogue,
    replay_witness,
    reproduce_lemma_constants,
    two_word_pattern,
)


# ---------------------------------------------------------------------------
# recurrence checks with frozen exact constants
# ---------------------------------------------------------------------------

def test_single_letters_recurrent_at_3():
    for a in "012":
        assert check_recurrent(Pattern(members=[a]), 3, 10).verdict
        assert min_recurrence_delta(Pattern(members=[a]), 12) == 3


def test_palindrome_start_patterns():
    assert min_recurrence_delta(PALINDROME_STARTS, 12) == 3
    assert min_recurrence_delta(NONPALINDROME_STARTS, 12) == 1


def test_adjacent_pairs_exact_min_deltas():
    expected = {"01": 12, "02": 10, "10": 10, "12": 12, "20": 12, "21": 10}
    for ab, want in expected.items():
        assert min_recurrence_delta(Pattern(members=[ab]), 40) == want
        assert check_recurrent(Pattern(members=[ab]), 12, 40).verdict


def test_gapped_pairs_worst_min_deltas():
    worst_by_gap = {1: 19, 2: 24, 4: 27, 5: 27, 6: 26, 7: 26, 8: 26}
    for delta, want in worst_by_gap.items():
        got = max(
            min_recurrence_delta(gapped_pair_pattern(a, b, delta), 40)
            for a in "012" for b in "012"
        )
        assert got == want, (delta, got)


def test_pattern_never_occurring_in_uniform_images():
    # same letter 26 apart re-reads the same image cell: impossible in
    # square-free pre-images
    p = gapped_pair_pattern("0", "0", 25)
    assert min_recurrence_delta(p, 60) is None
    cert = check_recurrent(p, 30, 60)
    assert not cert.verdict and cert.witness is not None
    assert p.first_occurrence(cert.witness) is None


def test_check_recurrent_needs_room():
    with pytest.raises(ValueError):
        check_recurrent(gapped_pair_pattern("0", "1", 8), 27, 30)  # 27+10 > 30


def test_min_recurrence_delta_agrees_with_long_scan():
    # occurrences in a long image never leave a gap exceeding the exact bound
    base = lex_least_squarefree(400)
    img = m_apply(h26_morphism(), base)
    for ab in ("01", "21"):
        p = Pattern(members=[ab])
        exact = min_recurrence_delta(p, 40)
        occ = [i for i in range(len(img) - 1) if img[i:i + 2] == ab]
        sample_worst = max(b - a - 1 for a, b in zip(occ, occ[1:]))
        assert sample_worst <= exact


# ---------------------------------------------------------------------------
# constructibility
# ---------------------------------------------------------------------------

def test_gap3_constructible_at_10():
    for a in "012":
        for b in "012":
            cert = check_constructible(gapped_pair_pattern(a, b, 3), 10, 2)
            assert cert.verdict and replay_witness(cert)
            assert set(cert.witnesses) == {
                "01", "02", "10", "12", "20", "21"
            }


def test_gap12_constructible_at_8():
    cert = check_constructible(gapped_pair_pattern("0", "0", 12), 8, 2)
    assert cert.verdict and replay_witness(cert)


def test_constructible_positions_replay():
    cert = check_constructible(gapped_pair_pattern("1", "2", 9), 8, 2)
    for t, (gamma, pos) in cert.witnesses.items():
        w = apply_h(t, gamma)
        assert cert.pattern.first_occurrence(w) == pos


def test_constructible_lex_tie_break_deterministic():
    a = check_constructible(gapped_pair_pattern("0", "1", 3), 10, 2)
    b = check_constructible(gapped_pair_pattern("0", "1", 3), 10, 2)
    assert a.witnesses == b.witnesses


def test_analytic_gap16_constructions():
    for delta in (16, 18, 28):
        for a in "012":
            for b in "012":
                cert = constructible_delta16_analytic(a, b, delta)
                assert cert.verdict
                for t, (gamma, pos) in cert.witnesses.items():
                    assert pos <= 2
                    assert cert.pattern.matches_at(apply_h(t, gamma), pos)
    with pytest.raises(ValueError):
        constructible_delta16_analytic("0", "1", 15)
    with pytest.raises(ValueError):
        constructible_delta16_analytic("0", "1", 46)


def test_analytic_agrees_with_search_on_gap16():
    # exhaustive search confirms the analytic bound of 2 at delta=16
    cert = check_constructible(gapped_pair_pattern("0", "2", 16), 2, 2)
    assert cert.verdict


# ---------------------------------------------------------------------------
# the excluded-triple catalogue
# ---------------------------------------------------------------------------

def test_catalogue_has_36_patterns():
    cat = p_bad_catalogue()
    assert len(cat) == 36
    assert len(set(cat)) == 36


def test_catalogue_first_template_span():
    # !0 .16. 0 .16. !0 has span 35 and a forced middle letter
    cat = p_bad_catalogue()
    spans = {p.span for p in cat}
    assert max(spans) == 35
    first = cat[0]
    assert first.span == 35
    letters, _ = first.cells[1]
    assert letters == {"0"}


def test_catalogue_members_all_fail_27_sweep():
    for p in p_bad_catalogue():
        cert = check_recurrent(p, 27, 70)
        assert not cert.verdict, p.describe()


def test_catalogue_members_constructible_at_13():
    # spot-check three; the full 36 run in the lemma report
    cat = p_bad_catalogue()
    for p in (cat[0], cat[17], cat[35]):
        cert = check_constructible(p, 13, 2)
        assert cert.verdict and replay_witness(cert)


# ---------------------------------------------------------------------------
# the aggregated report
# ---------------------------------------------------------------------------

def test_reproduce_lemma_constants_all_pass():
    report = reproduce_lemma_constants()
    assert report["ok"]
    assert report["failures"] == []
    assert report["checked"] == 899
    families = {r["family"] for r in report["records"]}
    assert families >= set(LEMMA_FAMILIES)


def test_reproduce_single_family_and_unknown_name():
    report = reproduce_lemma_constants(["two-word-pairs-6"])
    assert report["ok"] and report["checked"] == 15
    with pytest.raises(ValueError):
        reproduce_lemma_constants(["no-such-family"])


def test_report_deterministic():
    a = reproduce_lemma_constants(["forbidden-pairs-6"])
    b = reproduce_lemma_constants(["forbidden-pairs-6"])
    assert a["records"] == b["records"]


def test_two_word_pattern_check():
    cert = check_recurrent(two_word_pattern("01", "02"), 6, 30)
    assert cert.verdict
    # a single length-2 word alone is not 6-recurrent in general
    assert min_recurrence_delta(two_word_pattern("01", "01"), 30) > 6
