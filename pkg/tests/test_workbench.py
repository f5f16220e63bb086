from __future__ import annotations

import random
from fractions import Fraction

import pytest

from smallcancel.presentations import ParameterLadder, Presentation, symmetrize
from smallcancel.words import CyclicWord, Word, wicks_commutator_test
from smallcancel.workbench import (
    Counterexample,
    ScanReport,
    _certify_free,
    _certify_presented,
    candidate_classes,
    class_representative,
    cyclically_reduced_words,
    scan_free_group,
    scan_presentation,
    signed_permutation_key,
)

GENUS2 = Presentation(4, [Word.parse("abABcdCD")])


def test_cyclically_reduced_word_counts_match_the_closed_form():
    # over rank 2 there are 3^n + 1 + 2*[n even] such words of length n
    for n in range(1, 7):
        got = sum(1 for _ in cyclically_reduced_words(2, n))
        assert got == 3**n + 1 + (2 if n % 2 == 0 else 0)


def test_candidate_classes_cover_the_unreduced_enumeration():
    # every cyclically reduced word lands in exactly one listed class
    for gens, max_len in [(1, 5), (2, 5)]:
        listed = list(candidate_classes(gens, max_len))
        assert len(listed) == len(set(listed))
        reps = set(listed)
        for length in range(1, max_len + 1):
            for letters in cyclically_reduced_words(gens, length):
                rep = class_representative(CyclicWord(letters))
                assert rep in reps
        assert all(
            class_representative(w) == w for w in listed
        )  # reps are self-canonical
        assert len(listed) >= max_len  # at least the powers of a


def test_candidate_classes_start_with_single_letters():
    assert list(candidate_classes(2, 1)) == [
        CyclicWord.parse("a"),
        CyclicWord.parse("b"),
    ]


def test_signed_permutation_key_is_invariant():
    rng = random.Random(9)
    swaps = {1: 2, 2: 1}
    for _ in range(40):
        length = rng.randrange(1, 8)
        while True:
            letters = []
            for _ in range(length):
                g = rng.choice([1, -1, 2, -2])
                if letters and letters[-1] == -g:
                    continue
                letters.append(g)
            if len(letters) == length and letters[0] != -letters[-1]:
                break
        w = CyclicWord(letters)
        # swap the generators and flip the sign of the first one
        mapped = CyclicWord(
            tuple((1 if g > 0 else -1) * swaps[abs(g)] * (-1 if abs(g) == 1 else 1) for g in letters)
        )
        assert signed_permutation_key(w, 2) == signed_permutation_key(mapped, 2)
        assert (wicks_commutator_test(w) is None) == (
            wicks_commutator_test(mapped) is None
        )


def test_scan_free_screens_single_letters_by_exponent_sum():
    report = scan_free_group(2, 1, [2])
    assert report.candidates_tested == 2
    assert report.clean
    assert all("screened: nonzero exponent sum" in r for r in report.records)


def test_scan_free_rank_one_has_no_commutators_at_all():
    report = scan_free_group(1, 5, [2])
    assert report.candidates_tested == 5
    assert report.clean


def test_scan_free_is_clean_at_moderate_length():
    report = scan_free_group(2, 6, [2, 3])
    assert report.clean
    tested = [r for r in report.records if "tested" in r or "cached" in r]
    assert tested, "zero-exponent candidates must reach the graphical test"


def test_scan_free_symmetry_cache_changes_nothing():
    with_cache = scan_free_group(2, 6, [2, 3], use_symmetry_cache=True)
    without = scan_free_group(2, 6, [2, 3], use_symmetry_cache=False)
    assert with_cache.candidates_tested == without.candidates_tested
    assert with_cache.counterexamples == without.counterexamples
    assert [r.split(" ", 1)[0] for r in with_cache.records] == [
        r.split(" ", 1)[0] for r in without.records
    ]
    assert any("cached" in r for r in with_cache.records)
    assert not any("cached" in r for r in without.records)


def test_scan_free_rejects_bad_bounds():
    with pytest.raises(ValueError):
        scan_free_group(2, 0, [2])
    with pytest.raises(ValueError):
        scan_free_group(0, 3, [2])
    with pytest.raises(ValueError):
        scan_free_group(2, 3, [])
    with pytest.raises(ValueError):
        scan_free_group(2, 3, [1, 2])


def test_scan_reports_are_deterministic():
    def redacted(report: ScanReport) -> str:
        return "\n".join(
            line
            for line in report.render(verbose=True).splitlines()
            if not line.startswith("elapsed:")
        )

    assert redacted(scan_free_group(2, 4, [2])) == redacted(scan_free_group(2, 4, [2]))
    assert redacted(scan_presentation(GENUS2, 2, 2, [2])) == redacted(
        scan_presentation(GENUS2, 2, 2, [2])
    )


def test_scan_presentation_on_the_genus_two_group():
    report = scan_presentation(GENUS2, 3, 3, [2])
    assert report.clean
    assert report.candidates_tested == 80
    assert report.parameters.witness_len == 3
    assert any("lambda* = 1/8" in note for note in report.notes)
    assert any("consistency-only" in note for note in report.notes)
    text = report.render()
    assert "consistency-only" in text and "counterexamples: 0" in text


def test_scan_presentation_theorem_note_follows_the_ladder():
    roomy = ParameterLadder.geometric(Fraction(1, 4))
    report = scan_presentation(GENUS2, 1, 1, [2], ladder=roomy)
    assert any("covered by the theorem" in note for note in report.notes)


def test_scan_presentation_gates():
    with pytest.raises(ValueError, match="proper power"):
        scan_presentation(Presentation(2, [Word.parse("abab")]), 2, 2, [2])
    with pytest.raises(ValueError, match="lambda\\* = 1/4"):
        scan_presentation(Presentation(2, [Word.parse("abAB")]), 2, 2, [2])


def test_certifiers_build_transcripts_for_real_identities():
    # the certification helpers accept n = 1 so the reporting path can be
    # exercised with an honest commutator; the scans themselves only pass
    # n >= 2 and, per the theorem, never reach this code
    ce = _certify_free(CyclicWord.parse("abAB"), 1)
    assert isinstance(ce, Counterexample)
    assert ce.x * ce.y * ce.x.inverse() * ce.y.inverse() == Word.parse("abAB")
    assert any("rotation" in line for line in ce.transcript)

    s = symmetrize(GENUS2)
    ce = _certify_presented(
        CyclicWord.parse("abAB"), 1, Word.parse("a"), Word.parse("b"), s
    )
    assert ce.n == 1
    assert "Dehn reduction terminates at the empty word" in ce.transcript[-1]


def test_certifier_demonstrates_why_the_torsion_gate_exists():
    # in the group with a^3 = 1 the proper power a^3 equals the trivial
    # commutator: a genuine counterexample made possible only by torsion,
    # which is exactly what the scan's precondition gate excludes
    s = symmetrize(Presentation(1, [Word.parse("aaa")]))
    ce = _certify_presented(CyclicWord.parse("a"), 3, Word(), Word(), s)
    assert ce.n == 3
    assert any("cancel relator" in line for line in ce.transcript)


def test_certifiers_reject_bogus_hits():
    with pytest.raises(AssertionError, match="unverifiable"):
        _certify_free(CyclicWord.parse("aabb"), 2)
    s = symmetrize(GENUS2)
    with pytest.raises(AssertionError, match="unverifiable"):
        _certify_presented(
            CyclicWord.parse("a"), 2, Word.parse("a"), Word.parse("b"), s
        )


def test_report_rows_have_a_summary_and_optional_details():
    report = scan_free_group(2, 2, [2])
    rows = report.rows()
    assert rows[0][0] == "scan" and rows[0][4] == "clean"
    detailed = report.rows(verbose=True)
    assert len(detailed) == 1 + report.candidates_tested
    assert all(r[0] == "candidate" for r in detailed[1:])
