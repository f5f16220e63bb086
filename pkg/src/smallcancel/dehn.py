"""Dehn's algorithm for C'(1/6) sets, with a replayable substitution trace."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .presentations import SymmetrizedSet, max_piece_ratio
from .words import Word, exponent_vector

_SIXTH = Fraction(1, 6)
_ratio_cache: dict[int, Fraction] = {}


def _piece_ratio(s: SymmetrizedSet) -> Fraction:
    key = id(s)
    if key not in _ratio_cache:
        if len(_ratio_cache) > 64:
            _ratio_cache.clear()
        _ratio_cache[key] = max_piece_ratio(s)
    return _ratio_cache[key]


def require_sixth(s: SymmetrizedSet) -> None:
    ratio = _piece_ratio(s)
    if ratio >= _SIXTH:
        raise ValueError(
            f"Dehn's algorithm needs C'(1/6); this set only satisfies C'(lambda) "
            f"for lambda > {ratio}"
        )


@dataclass(frozen=True)
class DehnStep:
    """One substitution: input-so-far = conjugator * relator * conjugator^-1 * rest."""

    conjugator: Word
    relator: Word


@dataclass(frozen=True)
class DehnTrace:
    steps: tuple[DehnStep, ...]
    final_conjugator: Word
    terminal: Word

    def reconstruct(self) -> Word:
        """Multiply the applied substitutions back; free-reduces to the input."""
        acc = Word()
        for st in self.steps:
            acc = acc * st.relator.conjugate_by(st.conjugator)
        return acc * self.terminal.conjugate_by(self.final_conjugator)


def _best_match(cur: tuple[int, ...], s: SymmetrizedSet, maxrel: int):
    """Longest cyclic subword of cur that is more than half of a member.

    Returns (position, matched length, relator) or None.  Ties go to the
    earliest position, then to the canonically first relator.
    """
    n = len(cur)
    doubled = (cur + cur)[: n + maxrel - 1]
    best = None
    for p in range(n):
        window = doubled[p:]
        for r in s.members:
            rl = r.letters
            limit = min(len(rl), len(window), n)
            m = 0
            while m < limit and rl[m] == window[m]:
                m += 1
            if 2 * m > len(rl) and (best is None or m > best[1]):
                best = (p, m, r)
    return best


def dehn_reduce(w: Word, s: SymmetrizedSet, with_trace: bool = False):
    """Repeatedly replace cyclic subwords longer than half a relator.

    Each match t (a prefix of a relator r = t*u) is replaced by u^-1, which is
    strictly shorter, so the loop terminates.  The scan is cyclic: a match may
    wrap around the end of the current word, in which case the word is rotated
    first and the rotation is charged to the running conjugator.  The terminal
    word is empty iff w is trivial in the presented group.

    With with_trace=True also returns the DehnTrace whose reconstruct() gives
    back the input word exactly.
    """
    require_sixth(s)
    maxrel = s.max_length()
    cur = w.letters
    g = Word()
    steps: list[DehnStep] = []
    while cur:
        found = _best_match(cur, s, maxrel)
        if found is None:
            break
        p, m, r = found
        u_inv = Word(r.letters[m:]).inverse()
        n = len(cur)
        if p + m <= n:
            prefix = Word(cur[:p])
            if with_trace:
                steps.append(DehnStep(g * prefix, r))
            cur = (Word(cur[:p]) * u_inv * Word(cur[p + m :])).letters
        else:
            rotated = cur[p:] + cur[:p]
            prefix = Word(cur[:p])
            if with_trace:
                steps.append(DehnStep(g * prefix, r))
            g = g * prefix
            cur = (u_inv * Word(rotated[m:])).letters
    terminal = Word(cur)
    if with_trace:
        return terminal, DehnTrace(tuple(steps), g, terminal)
    return terminal


def is_trivial(w: Word, s: SymmetrizedSet) -> bool:
    return len(dehn_reduce(w, s)) == 0


def _relator_sums_all_zero(s: SymmetrizedSet, gens: int) -> bool:
    return all(exponent_vector(r, gens) == (0,) * gens for r in s.members)


def shortlex_words(gens: int, max_len: int):
    """All reduced words over gens generators up to max_len, shortlex order."""
    alphabet: list[int] = []
    for i in range(1, gens + 1):
        alphabet.extend((i, -i))
    layer: list[tuple[int, ...]] = [()]
    yield Word()
    for _ in range(max_len):
        nxt: list[tuple[int, ...]] = []
        for base in layer:
            for g in alphabet:
                if base and base[-1] == -g:
                    continue
                word = base + (g,)
                nxt.append(word)
                yield Word(word)
        layer = nxt


def bounded_commutator_search(
    w: Word, s: SymmetrizedSet, max_len: int, generator_count: int | None = None
) -> tuple[Word, Word] | None:
    """First (x, y) in shortlex order with [x, y] = w in the presented group.

    Absence is bounded evidence only, except on one provable shortcut: when
    every relator abelianizes to zero, the abelianization is free, so a w with
    a nonzero exponent vector cannot equal any commutator and the search is
    skipped entirely.
    """
    require_sixth(s)
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    if generator_count is None:
        generator_count = max(
            max(abs(g) for r in s.members for g in r.letters),
            max((abs(g) for g in w.letters), default=1),
        )
    if _relator_sums_all_zero(s, generator_count) and exponent_vector(
        w, generator_count
    ) != (0,) * generator_count:
        return None
    w_inv = w.inverse()
    for x in shortlex_words(generator_count, max_len):
        x_inv = x.inverse()
        for y in shortlex_words(generator_count, max_len):
            candidate = x * y * x_inv * y.inverse() * w_inv
            if is_trivial(candidate, s):
                return (x, y)
    return None
