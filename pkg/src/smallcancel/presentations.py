"""Symmetrized relator sets, exact piece ratios, and the parameter ladder."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .words import Word, is_proper_power, letter_key, power


def _word_sort_key(w: Word):
    return (len(w), tuple(letter_key(g) for g in w.letters))


@dataclass(frozen=True)
class Presentation:
    """A finite presentation: generator count plus cyclically reduced relators."""

    generator_count: int
    relators: tuple[Word, ...]

    def __init__(self, generator_count: int, relators: Iterable[Word]):
        if generator_count < 1:
            raise ValueError("generator_count must be positive")
        rels = tuple(relators)
        for r in rels:
            if len(r) == 0:
                raise ValueError("empty relator")
            if not r.is_cyclically_reduced():
                raise ValueError(f"relator {r} is not cyclically reduced")
            top = max(abs(g) for g in r.letters)
            if top > generator_count:
                raise ValueError(
                    f"relator {r} uses generator {top} > count {generator_count}"
                )
        object.__setattr__(self, "generator_count", generator_count)
        object.__setattr__(self, "relators", rels)


class SymmetrizedSet:
    """A set of words closed under rotation and inversion.

    Membership order is canonical (shortlex), so every scan over the set is
    deterministic.
    """

    __slots__ = ("members", "_index")

    def __init__(self, words: Iterable[Word]):
        members = sorted(set(words), key=_word_sort_key)
        index = frozenset(w.letters for w in members)
        for w in members:
            if len(w) == 0:
                raise ValueError("empty word in symmetrized set")
            if not w.is_cyclically_reduced():
                raise ValueError(f"{w} is not cyclically reduced")
            rot = w.letters[1:] + w.letters[:1]
            if rot not in index or w.inverse().letters not in index:
                raise ValueError(f"set not closed under rotation/inversion at {w}")
        self.members: tuple[Word, ...] = tuple(members)
        self._index = index

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, w: Word) -> bool:
        return w.letters in self._index

    def contains_letters(self, letters: tuple[int, ...]) -> bool:
        """Raw membership test that does not reduce its argument first."""
        return letters in self._index

    def max_length(self) -> int:
        return max(len(w) for w in self.members)


def symmetrize(p: Presentation) -> SymmetrizedSet:
    """All rotations of all relators and of their inverses, deduplicated."""
    out: set[Word] = set()
    for r in p.relators:
        for base in (r.letters, r.inverse().letters):
            for k in range(len(base)):
                out.add(Word(base[k:] + base[:k]))
    return SymmetrizedSet(out)


def _lcp(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    n = min(len(a), len(b))
    for i in range(n):
        if a[i] != b[i]:
            return i
    return n


def max_piece_ratio(s: SymmetrizedSet) -> Fraction:
    """The exact piece threshold: C'(lambda) holds iff lambda > this value.

    Maximum over ordered pairs of distinct members (r1, r2) of
    |common prefix| / |r1|.  Common prefixes of the symmetrized set capture
    all common subwords, since the set is closed under rotation.
    """
    if len(s) == 0:
        raise ValueError("empty symmetrized set")
    if len(s) < 2:
        raise ValueError("need at least two members")
    best = Fraction(0)
    for r1 in s.members:
        for r2 in s.members:
            if r1 == r2:
                continue
            ratio = Fraction(_lcp(r1.letters, r2.letters), len(r1))
            if ratio > best:
                best = ratio
    return best


def torsion_free_surrogate(s: SymmetrizedSet) -> bool:
    """True iff no member is a proper power."""
    return all(is_proper_power(r) is None for r in s.members)


@dataclass(frozen=True)
class PowerOverlap:
    v_length: int
    bound: Fraction
    holds: bool


def power_overlap_bound(w: Word, n: int, r: Word, lam: Fraction) -> PowerOverlap:
    """Compare the overlap of r with w^n against (1/2 + lambda)|r|.

    The interesting hypothesis (w not conjugate to a shorter word) is
    approximated by requiring w cyclically reduced and nonempty; the verdict
    is only meaningful under that hypothesis.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(w) == 0 or not w.is_cyclically_reduced():
        raise ValueError("w must be nonempty and cyclically reduced")
    v_length = _lcp(r.letters, power(w, n).letters)
    bound = (Fraction(1, 2) + Fraction(lam)) * len(r)
    return PowerOverlap(v_length, bound, v_length < bound)


@dataclass(frozen=True)
class ParameterLadder:
    """The chain 0 < lambda < lambda1 < ... < lambda7 < 1 with enforced gaps.

    Each value must be at least separation_factor times the previous one.
    The default factor 100 dominates every fixed constant the arguments
    need (the largest is 2018, and 2018 < 100^2).
    """

    lambda_: Fraction
    lambda1: Fraction
    lambda2: Fraction
    lambda3: Fraction
    lambda4: Fraction
    lambda5: Fraction
    lambda6: Fraction
    lambda7: Fraction
    separation_factor: int = 100

    def values(self) -> tuple[Fraction, ...]:
        return (
            self.lambda_,
            self.lambda1,
            self.lambda2,
            self.lambda3,
            self.lambda4,
            self.lambda5,
            self.lambda6,
            self.lambda7,
        )

    @staticmethod
    def geometric(
        start: Fraction = Fraction(1, 10**16), factor: int = 100
    ) -> "ParameterLadder":
        vals = [Fraction(start) * factor**i for i in range(8)]
        return ParameterLadder(*vals, separation_factor=factor)


DEFAULT_LADDER = ParameterLadder.geometric()


def validate_ladder(ladder: ParameterLadder) -> bool:
    vals = ladder.values()
    if vals[0] <= 0 or vals[-1] >= 1:
        return False
    factor = ladder.separation_factor
    for prev, cur in zip(vals, vals[1:]):
        if cur <= prev or cur < factor * prev:
            return False
    return True


def parse_presentation(text: str) -> Presentation:
    """Parse the presentation file format.

    Line 1: `generators: <k>`.  Every following nonempty line is one relator
    in the word serialization.  Lines starting with `#` are comments.
    """
    lines = [
        ln.strip()
        for ln in text.splitlines()
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not lines or not lines[0].startswith("generators:"):
        raise ValueError("first line must be 'generators: <k>'")
    try:
        k = int(lines[0].split(":", 1)[1])
    except ValueError as e:
        raise ValueError(f"bad generator count: {lines[0]!r}") from e
    relators = [Word.parse(ln) for ln in lines[1:]]
    return Presentation(k, relators)


def load_presentation(path: str | Path) -> Presentation:
    return parse_presentation(Path(path).read_text())


def format_presentation(p: Presentation) -> str:
    lines = [f"generators: {p.generator_count}"]
    lines.extend(str(r) for r in p.relators)
    return "\n".join(lines) + "\n"
