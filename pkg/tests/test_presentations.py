from __future__ import annotations

import random
from fractions import Fraction

import brute
from smallcancel.presentations import (
    DEFAULT_LADDER,
    ParameterLadder,
    Presentation,
    SymmetrizedSet,
    format_presentation,
    max_piece_ratio,
    parse_presentation,
    power_overlap_bound,
    symmetrize,
    torsion_free_surrogate,
    validate_ladder,
)
from smallcancel.words import Word

GENUS2 = Presentation(4, [Word.parse("abABcdCD")])


def sym(*texts: str, gens: int = 4) -> SymmetrizedSet:
    return symmetrize(Presentation(gens, [Word.parse(t) for t in texts]))


def symmetrize_str(relator: str) -> set[str]:
    out = set()
    for base in (relator, brute.inv_str(relator)):
        out.update(brute.rotations_str(base))
    return out


def test_presentation_validation():
    Presentation(2, [Word.parse("abAB")])
    for bad_args in (
        (2, [Word()]),
        (2, [Word.parse("abA")]),
        (1, [Word.parse("ab")]),
        (0, []),
    ):
        try:
            Presentation(*bad_args)
            assert False, bad_args
        except ValueError:
            pass


def test_symmetrize_examples():
    assert {str(w) for w in sym("ab", gens=2)} == {"ab", "ba", "BA", "AB"}
    assert len(sym("aab", gens=2)) == 6
    assert {str(w) for w in sym("aab", gens=2)} == {"aab", "aba", "baa", "BAA", "ABA", "AAB"}
    assert len(sym("abAB", gens=2)) == 8
    assert len(sym("abABcdCD")) == 16


def test_symmetrize_matches_string_oracle_and_size_rule():
    rng = random.Random(4001)
    candidates = [
        t
        for t in brute.all_reduced_words(2, 6)
        if t and brute.is_cyclically_reduced_str(t)
    ]
    for _ in range(100):
        text = rng.choice(candidates)
        got = {str(w) for w in sym(text, gens=2)}
        expected = symmetrize_str(text)
        assert got == expected, text
        assert (2 * len(text)) % len(got) == 0
        not_power = brute.proper_power_brute(text, 2) is None
        not_self_inverse = brute.inv_str(text) not in brute.rotations_str(text)
        if not_power and not_self_inverse:
            assert len(got) == 2 * len(text), text


def test_symmetrize_idempotent():
    s = sym("abAB", gens=2)
    again = symmetrize(Presentation(2, list(s.members)))
    assert again.members == s.members


def test_symmetrized_set_rejects_unclosed_input():
    try:
        SymmetrizedSet([Word.parse("ab")])
        assert False
    except ValueError:
        pass


def test_max_piece_ratio_examples():
    assert max_piece_ratio(sym("ab", gens=2)) == 0
    assert max_piece_ratio(sym("abAB", gens=2)) == Fraction(1, 4)
    assert max_piece_ratio(sym("abABcdCD")) == Fraction(1, 8)


def random_cyclic_word(rng: random.Random, gens: int, maxlen: int) -> str:
    alphabet = "abcdefghij"[:gens] + "ABCDEFGHIJ"[:gens]
    while True:
        n = rng.randint(2, maxlen)
        out: list[str] = []
        for _ in range(n):
            choices = [c for c in alphabet if not out or c != brute.inv_str(out[-1])]
            out.append(rng.choice(choices))
        text = "".join(out)
        if brute.is_cyclically_reduced_str(text):
            return text


def test_max_piece_ratio_random_sets_against_brute_force():
    rng = random.Random(880)
    for _ in range(30):
        texts = {random_cyclic_word(rng, 3, 12) for _ in range(rng.randint(1, 5))}
        s = sym(*texts, gens=3)
        strs = set()
        for t in texts:
            strs |= symmetrize_str(t)
        best = Fraction(0)
        for r1 in strs:
            for r2 in strs:
                if r1 == r2:
                    continue
                k = 0
                while k < min(len(r1), len(r2)) and r1[k] == r2[k]:
                    k += 1
                best = max(best, Fraction(k, len(r1)))
        assert max_piece_ratio(s) == best, texts


def test_torsion_free_surrogate():
    assert torsion_free_surrogate(sym("aaa", gens=1)) is False
    assert torsion_free_surrogate(sym("abab", gens=2)) is False
    assert torsion_free_surrogate(sym("abABcdCD")) is True


def test_power_overlap_examples():
    r = Word.parse("abABcdCD")
    lam = Fraction(1, 6)
    for text, n, v_len in (("b", 8, 0), ("a", 8, 1), ("ab", 4, 2)):
        res = power_overlap_bound(Word.parse(text), n, r, lam)
        assert res.v_length == v_len
        assert res.bound == Fraction(16, 3)
        assert res.holds
    try:
        power_overlap_bound(Word.parse("a"), 0, r, lam)
        assert False
    except ValueError:
        pass
    try:
        power_overlap_bound(Word.parse("abA"), 2, r, lam)
        assert False
    except ValueError:
        pass


def test_ladder_validation():
    geometric10 = ParameterLadder.geometric(Fraction(1, 10**9), factor=10)
    assert validate_ladder(geometric10)
    assert validate_ladder(DEFAULT_LADDER)
    vals = list(geometric10.values())
    vals[4] = vals[3]
    assert not validate_ladder(ParameterLadder(*vals, separation_factor=10))
    vals = list(geometric10.values())
    vals[7] = Fraction(3, 2)
    assert not validate_ladder(ParameterLadder(*vals, separation_factor=10))
    # gap too small
    assert not validate_ladder(
        ParameterLadder(*[Fraction(1, 2**i) for i in range(9, 1, -1)], separation_factor=100)
    )


def test_presentation_file_round_trip(tmp_path):
    text = "# genus two surface group\ngenerators: 4\nabABcdCD\n"
    p = parse_presentation(text)
    assert p.generator_count == 4
    assert p.relators == (Word.parse("abABcdCD"),)
    out = tmp_path / "p.txt"
    out.write_text(format_presentation(p))
    assert parse_presentation(out.read_text()) == p
    for bad in ("", "abAB\n", "generators: x\nab\n"):
        try:
            parse_presentation(bad)
            assert False, repr(bad)
        except ValueError:
            pass
