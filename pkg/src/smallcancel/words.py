"""Words in a free group: free reduction, cyclic words, powers, commutator shapes.

Letters are nonzero ints: generator i is +i, its inverse is -i.  Text form
uses a..z for generators 1..26 and A..Z for their inverses; the empty word
prints as "1".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


def letter_key(g: int) -> tuple[int, int]:
    """Sort key realizing the order a < A < b < B < ..."""
    return (abs(g), 0 if g > 0 else 1)


def _reduce_letters(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for g in letters:
        if g == 0:
            raise ValueError("letter 0 is not a generator")
        if out and out[-1] == -g:
            out.pop()
        else:
            out.append(g)
    return tuple(out)


def _invert_letters(letters: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(-g for g in reversed(letters))


class Word:
    """A freely reduced word.  Construction reduces its input."""

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[int] = ()):
        object.__setattr__(self, "letters", _reduce_letters(letters))

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    @staticmethod
    def parse(text: str) -> "Word":
        return Word(parse_letters(text))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(("Word", self.letters))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(_invert_letters(self.letters))

    def __invert__(self) -> "Word":
        return self.inverse()

    def __pow__(self, n: int) -> "Word":
        return power(self, n)

    def conjugate_by(self, c: "Word") -> "Word":
        """c * self * c^-1, reduced."""
        return Word(c.letters + self.letters + _invert_letters(c.letters))

    def is_cyclically_reduced(self) -> bool:
        ls = self.letters
        return len(ls) == 0 or ls[0] != -ls[-1]

    def __str__(self) -> str:
        return format_letters(self.letters)

    def __repr__(self) -> str:
        return f"Word.parse({str(self)!r})"


def _canonical_rotation(letters: tuple[int, ...]) -> int:
    """Index k such that letters[k:]+letters[:k] is lexicographically least."""
    n = len(letters)
    if n == 0:
        return 0
    doubled = letters + letters
    best = 0
    for k in range(1, n):
        for t in range(n):
            a, b = doubled[best + t], doubled[k + t]
            if a == b:
                continue
            if letter_key(b) < letter_key(a):
                best = k
            break
    return best


class CyclicWord:
    """A cyclically reduced word up to rotation.

    The stored letter sequence is always the canonical representative (the
    lexicographically least rotation), so equality and hashing are plain
    sequence comparisons.
    """

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[int] = ()):
        ls = tuple(letters)
        if _reduce_letters(ls) != ls:
            raise ValueError(f"not freely reduced: {format_letters(ls)}")
        if ls and ls[0] == -ls[-1]:
            raise ValueError(f"not cyclically reduced: {format_letters(ls)}")
        k = _canonical_rotation(ls)
        object.__setattr__(self, "letters", ls[k:] + ls[:k])

    def __setattr__(self, name, value):
        raise AttributeError("CyclicWord is immutable")

    @staticmethod
    def parse(text: str) -> "CyclicWord":
        return CyclicWord(parse_letters(text))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __eq__(self, other) -> bool:
        return isinstance(other, CyclicWord) and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(("CyclicWord", self.letters))

    def rotations(self) -> list[tuple[int, ...]]:
        n = len(self.letters)
        d = self.letters + self.letters
        return [d[k : k + n] for k in range(n)] if n else [()]

    def to_word(self) -> Word:
        return Word(self.letters)

    def inverse(self) -> "CyclicWord":
        return CyclicWord(_invert_letters(self.letters))

    def __str__(self) -> str:
        return format_letters(self.letters)

    def __repr__(self) -> str:
        return f"CyclicWord.parse({str(self)!r})"


def free_reduce(letters: Iterable[int]) -> Word:
    """Freely reduce a raw letter sequence."""
    return Word(letters)


def cyclic_reduce(w: Word) -> tuple[CyclicWord, Word]:
    """Split w as conjugator * core * conjugator^-1 with a cyclically reduced core.

    The core is returned canonically rotated; the conjugator absorbs the
    rotation so that reduce(c * core * c^-1) == w exactly.

    >>> core, c = cyclic_reduce(Word.parse("Baab"))
    >>> str(core), str(c)
    ('aa', 'B')
    """
    ls = list(w.letters)
    conj: list[int] = []
    while len(ls) >= 2 and ls[0] == -ls[-1]:
        conj.append(ls[0])
        ls = ls[1:-1]
    core_letters = tuple(ls)
    k = _canonical_rotation(core_letters)
    conjugator = Word(tuple(conj) + core_letters[:k])
    return CyclicWord(core_letters[k:] + core_letters[:k]), conjugator


def power(w: Word, n: int) -> Word:
    """The freely reduced n-th power, n >= 1."""
    if n < 1:
        raise ValueError(f"exponent must be >= 1, got {n}")
    core, c = cyclic_reduce(w)
    inner = core.letters * n
    return Word(c.letters + inner + _invert_letters(c.letters))


def is_proper_power(w: Word) -> tuple[Word, int] | None:
    """Return (root, n) with n >= 2 maximal and root^n == w, or None.

    The check is graphical on the cyclically reduced core: the core must be a
    repetition of one of its prefixes.  The empty word is not a proper power.
    """
    core, c = cyclic_reduce(w)
    v = core.letters
    L = len(v)
    if L == 0:
        return None
    for d in range(1, L):
        if L % d != 0:
            continue
        if all(v[i] == v[i % d] for i in range(d, L)):
            root = Word(c.letters + v[:d] + _invert_letters(c.letters))
            return root, L // d
    return None


def exponent_sum(w: Word | CyclicWord, gen: int) -> int:
    """Signed number of occurrences of generator gen (a positive index)."""
    if gen < 1:
        raise ValueError("generator index must be positive")
    return sum(1 if g == gen else -1 if g == -gen else 0 for g in w.letters)


def exponent_vector(w: Word | CyclicWord, generator_count: int) -> tuple[int, ...]:
    sums = [0] * generator_count
    for g in w.letters:
        sums[abs(g) - 1] += 1 if g > 0 else -1
    return tuple(sums)


@dataclass(frozen=True)
class WicksDecomposition:
    """A rotation of a cyclic word in the shape x y z x^-1 y^-1 z^-1.

    The witness pair (u, v) = (x*y, z*x^-1) satisfies
    reduce(u v u^-1 v^-1) == the matched rotation; this is asserted when the
    decomposition is built.
    """

    x: Word
    y: Word
    z: Word
    u: Word
    v: Word


def wicks_commutator_test(w: CyclicWord) -> WicksDecomposition | None:
    """Find a Wicks commutator decomposition of the cyclic word w, if any.

    Scans rotations (outer) and split lengths |x|, |y| (inner); the first
    matching decomposition is returned.  Odd length is rejected immediately.
    The empty word decomposes trivially.
    """
    n = len(w)
    if n % 2 == 1:
        return None
    if n == 0:
        e = Word()
        return WicksDecomposition(e, e, e, e, e)
    h = n // 2
    doubled = w.letters + w.letters
    for k in range(n):
        r = doubled[k : k + n]
        for lx in range(h + 1):
            # x^-1 occupies r[h : h+lx]
            if any(r[h + t] != -r[lx - 1 - t] for t in range(lx)):
                continue
            for ly in range(h - lx + 1):
                if any(r[h + lx + t] != -r[lx + ly - 1 - t] for t in range(ly)):
                    continue
                lz = h - lx - ly
                if any(r[h + lx + ly + t] != -r[h - 1 - t] for t in range(lz)):
                    continue
                x = Word(r[:lx])
                y = Word(r[lx : lx + ly])
                z = Word(r[lx + ly : h])
                u = x * y
                v = z * x.inverse()
                comm = u * v * u.inverse() * v.inverse()
                assert comm.letters == r, "witness failed to certify"
                return WicksDecomposition(x, y, z, u, v)
    return None


_ORD_A, _ORD_A_UP = ord("a"), ord("A")


def parse_letters(text: str) -> tuple[int, ...]:
    """Parse the ASCII form of a word (without reducing it).  "1" is empty."""
    if text == "1" or text == "":
        return ()
    out = []
    for ch in text:
        o = ord(ch)
        if _ORD_A <= o < _ORD_A + 26:
            out.append(o - _ORD_A + 1)
        elif _ORD_A_UP <= o < _ORD_A_UP + 26:
            out.append(-(o - _ORD_A_UP + 1))
        else:
            raise ValueError(f"bad letter {ch!r} in word {text!r}")
    return tuple(out)


def format_letter(g: int) -> str:
    if not 1 <= abs(g) <= 26:
        raise ValueError(f"letter {g} outside a..z range")
    return chr(_ORD_A + g - 1) if g > 0 else chr(_ORD_A_UP - g - 1)


def format_letters(letters: Iterable[int]) -> str:
    text = "".join(format_letter(g) for g in letters)
    return text or "1"
