"""Positive braid words, permutations and the greedy left normal form.

Convention used throughout the package: a word acts left to right. Start
from the arrangement ``[1, 2, ..., n]`` and, for each letter ``σ_i`` in
order, swap the entries at positions ``i`` and ``i + 1``. The final
arrangement is the one-line notation of the underlying permutation, so
``images[k - 1]`` is the strand (named by its starting position) that ends
at position ``k``. Under this convention ``σ₁σ₂`` is ``[2,3,1]`` and
``perm(w1 · w2) == perm(w1).then(perm(w2))``.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Iterable, Iterator

from .text_format import WordFormatError, format_int_list

logger = logging.getLogger(__name__)

DEFAULT_CLASS_BUDGET = 100_000


class BraidError(Exception):
    """Error in a braid word operation."""

    pass


class BraidValidationError(BraidError, ValueError):
    """A permutation or word violates its structural invariants."""

    pass


class NonPositiveWordError(BraidError):
    """An operation that requires a positive word received inverse letters."""

    pass


class StrandMismatchError(BraidError):
    """Two words (or a word and a permutation) have different strand counts."""

    pass


class OracleBudgetError(BraidError):
    """An exhaustive search exceeded its size budget."""

    def __init__(self, message: str, budget: int):
        super().__init__(message)
        self.budget = budget


@dataclass(frozen=True)
class Permutation:
    """A bijection on {1..n} in one-line notation."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        images = tuple(self.images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise BraidValidationError(f"not a permutation of 1..{len(images)}: {list(images)}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def transposition(cls, n: int, i: int) -> Permutation:
        """The adjacent transposition s_i on n points."""
        if not 1 <= i < n:
            raise BraidValidationError(f"generator index {i} out of range for {n} strands")
        images = list(range(1, n + 1))
        images[i - 1], images[i] = images[i], images[i - 1]
        return cls(tuple(images))

    @classmethod
    def block_transposition(cls, n: int, m: int) -> Permutation:
        """The symmetry c_{n,m}: the block of m strands moves in front of the block of n."""
        return cls(tuple(range(n + 1, n + m + 1)) + tuple(range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, k: int) -> int:
        return self.images[k - 1]

    def then(self, other: Permutation) -> Permutation:
        """Sequential composite: first ``self``, then ``other`` (word concatenation)."""
        if other.n != self.n:
            raise StrandMismatchError(f"cannot compose permutations on {self.n} and {other.n} points")
        return Permutation(tuple(self.images[k - 1] for k in other.images))

    @staticmethod
    def compose(g: Permutation, f: Permutation) -> Permutation:
        """g ∘ f: apply f, then g."""
        return f.then(g)

    def inverse(self) -> Permutation:
        inv = [0] * self.n
        for position, strand in enumerate(self.images, start=1):
            inv[strand - 1] = position
        return Permutation(tuple(inv))

    def block_sum(self, other: Permutation) -> Permutation:
        """Tensor product in Σ: ``other`` acts on the strands after ``self``'s."""
        return Permutation(self.images + tuple(k + self.n for k in other.images))

    def inversions(self) -> int:
        return sum(1 for a, b in combinations(self.images, 2) if a > b)

    def is_identity(self) -> bool:
        return all(k == v for k, v in enumerate(self.images, start=1))

    def left_descents(self) -> frozenset[int]:
        """Generators σ_i that can begin the minimal braid of this permutation."""
        ends = self.inverse().images
        return frozenset(i for i in range(1, self.n) if ends[i - 1] > ends[i])

    def right_descents(self) -> frozenset[int]:
        """Generators σ_i that can end the minimal braid of this permutation."""
        return frozenset(i for i in range(1, self.n) if self.images[i - 1] > self.images[i])

    def to_list(self) -> list[int]:
        return list(self.images)

    def __str__(self) -> str:
        return format_int_list(self.images)


Letter = tuple[int, int]


@dataclass(frozen=True)
class BraidWord:
    """A word in the Artin generators σ_i^{±1} on ``strands`` strands."""

    strands: int
    letters: tuple[Letter, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.strands, int) or self.strands < 0:
            raise BraidValidationError(f"strand count must be a nonnegative integer, got {self.strands!r}")
        letters = tuple((int(i), int(sign)) for i, sign in self.letters)
        for pos, (i, sign) in enumerate(letters):
            if not 1 <= i <= self.strands - 1:
                raise BraidValidationError(
                    f"letter {pos}: generator index {i} out of range 1..{self.strands - 1}"
                )
            if sign not in (1, -1):
                raise BraidValidationError(f"letter {pos}: sign must be +1 or -1, got {sign}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def positive(cls, strands: int, indices: Iterable[int]) -> BraidWord:
        return cls(strands, tuple((i, 1) for i in indices))

    @classmethod
    def empty(cls, strands: int) -> BraidWord:
        return cls(strands, ())

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.letters)

    def is_positive(self) -> bool:
        return all(sign == 1 for _, sign in self.letters)

    def require_positive(self, operation: str) -> None:
        if not self.is_positive():
            raise NonPositiveWordError(f"{operation} requires a positive word, got {format_word(self)}")

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def concat(self, other: BraidWord) -> BraidWord:
        if other.strands != self.strands:
            raise StrandMismatchError(
                f"cannot concatenate words on {self.strands} and {other.strands} strands"
            )
        return BraidWord(self.strands, self.letters + other.letters)

    def reversed(self) -> BraidWord:
        return BraidWord(self.strands, self.letters[::-1])

    def inverse(self) -> BraidWord:
        return BraidWord(self.strands, tuple((i, -sign) for i, sign in reversed(self.letters)))

    def shifted(self, offset: int, strands: int) -> BraidWord:
        """Re-index onto ``strands`` strands, moving every generator up by ``offset``."""
        return BraidWord(strands, tuple((i + offset, sign) for i, sign in self.letters))

    def to_dict(self) -> dict[str, Any]:
        return {
            "strands": self.strands,
            "letters": [i * sign for i, sign in self.letters],
            "text": format_word(self),
        }

    def __str__(self) -> str:
        return format_word(self)


@dataclass(frozen=True)
class PairCrossingTable:
    """Crossing counts per unordered pair of strands."""

    strands: int
    counts: dict[tuple[int, int], int] = field(default_factory=dict)

    def __getitem__(self, pair: tuple[int, int]) -> int:
        p, q = sorted(pair)
        return self.counts.get((p, q), 0)

    def total(self) -> int:
        return sum(self.counts.values())

    def max_count(self) -> int:
        return max(self.counts.values(), default=0)

    def to_dict(self) -> dict[str, int]:
        return {f"{p},{q}": c for (p, q), c in sorted(self.counts.items())}


@dataclass(frozen=True)
class Factorization:
    """A left-weighted split ``w = tau · omega`` with ``tau`` minimal."""

    tau: BraidWord
    omega: BraidWord

    def to_dict(self) -> dict[str, Any]:
        return {"tau": format_word(self.tau), "omega": format_word(self.omega)}


# ---------------------------------------------------------------------------
# Text format: "n: s1 s2 S1"
# ---------------------------------------------------------------------------


def format_word(w: BraidWord) -> str:
    """Print a word as ``n: s1 s2 S1`` (``S`` marks an inverse letter)."""
    tokens = "".join(f" {'s' if sign == 1 else 'S'}{i}" for i, sign in w.letters)
    return f"{w.strands}:{tokens}"


def parse_word(text: str, line: int = 1) -> BraidWord:
    """Parse the ``n: s1 s2 S1`` word format.

    Raises:
        WordFormatError: If the text is malformed; the error carries line and column.
    """
    head, sep, rest = text.partition(":")
    if not sep:
        raise WordFormatError("expected '<strands>:' prefix", line, 1)
    head_stripped = head.strip()
    if not head_stripped.isdigit():
        raise WordFormatError(f"invalid strand count {head_stripped!r}", line, 1)
    strands = int(head_stripped)
    if strands < 1:
        raise WordFormatError(f"strand count must be at least 1, got {strands}", line, 1)
    letters: list[Letter] = []
    column = len(head) + 2
    for token in rest.split(" "):
        if token:
            kind, digits = token[0], token[1:]
            if kind not in "sS" or not digits.isdigit():
                raise WordFormatError(f"invalid generator token {token!r}", line, column)
            index = int(digits)
            if not 1 <= index <= strands - 1:
                raise WordFormatError(
                    f"generator index {index} out of range 1..{strands - 1}", line, column
                )
            letters.append((index, 1 if kind == "s" else -1))
        column += len(token) + 1
    return BraidWord(strands, tuple(letters))


# ---------------------------------------------------------------------------
# Permutations and crossings
# ---------------------------------------------------------------------------


def underlying_permutation(w: BraidWord) -> Permutation:
    """The image of ``w`` in the symmetric group; signs are ignored."""
    arrangement = list(range(1, w.strands + 1))
    for i, _ in w.letters:
        arrangement[i - 1], arrangement[i] = arrangement[i], arrangement[i - 1]
    return Permutation(tuple(arrangement))


def pair_crossings(w: BraidWord) -> PairCrossingTable:
    """Count crossings per strand pair by tracking strands through the word."""
    w.require_positive("pair_crossings")
    counts = {pair: 0 for pair in combinations(range(1, w.strands + 1), 2)}
    arrangement = list(range(1, w.strands + 1))
    for i in w.indices:
        left, right = arrangement[i - 1], arrangement[i]
        counts[(min(left, right), max(left, right))] += 1
        arrangement[i - 1], arrangement[i] = right, left
    return PairCrossingTable(w.strands, counts)


def is_minimal(w: BraidWord) -> bool:
    """True iff no two strands cross twice."""
    return pair_crossings(w).max_count() <= 1


def permutation_braid(p: Permutation) -> BraidWord:
    """The bubble-sort reduced word for ``p``: a minimal positive lift."""
    arrangement = list(p.images)
    swaps: list[int] = []
    for end in range(p.n - 1, 0, -1):
        for k in range(end):
            if arrangement[k] > arrangement[k + 1]:
                arrangement[k], arrangement[k + 1] = arrangement[k + 1], arrangement[k]
                swaps.append(k + 1)
    return BraidWord.positive(p.n, reversed(swaps))


# ---------------------------------------------------------------------------
# Greedy left normal form
# ---------------------------------------------------------------------------


def _left_weight(a: Permutation, b: Permutation) -> tuple[Permutation, Permutation]:
    """Push crossings of ``b`` into ``a`` until S(b) ⊆ F(a)."""
    while True:
        movable = b.left_descents() - a.right_descents()
        if not movable:
            return a, b
        i = min(movable)
        s_i = Permutation.transposition(a.n, i)
        a, b = a.then(s_i), s_i.then(b)


def left_normal_form(w: BraidWord) -> tuple[Permutation, ...]:
    """The left-greedy factorization of a positive word into simple factors.

    Every factor is a nontrivial permutation (standing for its minimal
    braid) and every adjacent pair ``(A, B)`` satisfies ``S(B) ⊆ F(A)``.
    """
    w.require_positive("left_normal_form")
    factors = [Permutation.transposition(w.strands, i) for i in w.indices]
    changed = True
    while changed:
        changed = False
        for k in range(len(factors) - 1, 0, -1):
            a, b = _left_weight(factors[k - 1], factors[k])
            if a != factors[k - 1]:
                factors[k - 1], factors[k] = a, b
                changed = True
        factors = [f for f in factors if not f.is_identity()]
    return tuple(factors)


def normal_form_word(w: BraidWord) -> BraidWord:
    """Canonical representative of the monoid class of ``w``."""
    out = BraidWord.empty(w.strands)
    for factor in left_normal_form(w):
        out = out.concat(permutation_braid(factor))
    return out


def starting_set(w: BraidWord) -> frozenset[int]:
    """Generators σ_i such that some positive word equal to ``w`` begins with σ_i."""
    factors = left_normal_form(w)
    return factors[0].left_descents() if factors else frozenset()


def finishing_set(w: BraidWord) -> frozenset[int]:
    """Generators σ_i such that some positive word equal to ``w`` ends with σ_i."""
    w.require_positive("finishing_set")
    return starting_set(w.reversed())


def left_weighted_factorization(w: BraidWord) -> Factorization:
    """Split ``w`` as ``tau · omega`` with ``tau`` the longest minimal prefix."""
    w.require_positive("left_weighted_factorization")
    if is_minimal(w):
        return Factorization(w, BraidWord.empty(w.strands))
    head, *rest = left_normal_form(w)
    omega = BraidWord.empty(w.strands)
    for factor in rest:
        omega = omega.concat(permutation_braid(factor))
    return Factorization(permutation_braid(head), omega)


def monoid_equal(w1: BraidWord, w2: BraidWord) -> bool:
    """Equality in the positive braid monoid."""
    if w1.strands != w2.strands:
        raise StrandMismatchError(f"words on {w1.strands} and {w2.strands} strands")
    w1.require_positive("monoid_equal")
    w2.require_positive("monoid_equal")
    if len(w1) != len(w2):
        return False
    return left_normal_form(w1) == left_normal_form(w2)


# ---------------------------------------------------------------------------
# Brute-force oracles
# ---------------------------------------------------------------------------


def move_neighbours(indices: tuple[int, ...]) -> Iterator[tuple[int, tuple[int, ...]]]:
    """Yield ``(position, word)`` for every single YB or C move on ``indices``."""
    for p in range(len(indices) - 1):
        a, b = indices[p], indices[p + 1]
        if abs(a - b) > 1:
            yield p, indices[:p] + (b, a) + indices[p + 2 :]
        elif p + 2 < len(indices) and abs(a - b) == 1 and indices[p + 2] == a:
            yield p, indices[:p] + (b, a, b) + indices[p + 3 :]


def positive_class(w: BraidWord, max_size: int = DEFAULT_CLASS_BUDGET) -> frozenset[BraidWord]:
    """All positive words reachable from ``w`` by YB and C moves.

    Raises:
        OracleBudgetError: If the class has more than ``max_size`` words.
    """
    w.require_positive("positive_class")
    seen = {w.indices}
    queue = deque([w.indices])
    while queue:
        current = queue.popleft()
        for _, nxt in move_neighbours(current):
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > max_size:
                    raise OracleBudgetError(
                        f"positive class of {format_word(w)} exceeds budget {max_size}", max_size
                    )
                queue.append(nxt)
    logger.debug("positive_class %s: %d words", format_word(w), len(seen))
    return frozenset(BraidWord.positive(w.strands, word) for word in seen)


def starting_set_oracle(w: BraidWord, max_size: int = DEFAULT_CLASS_BUDGET) -> frozenset[int]:
    return frozenset(word.indices[0] for word in positive_class(w, max_size) if len(word))


def finishing_set_oracle(w: BraidWord, max_size: int = DEFAULT_CLASS_BUDGET) -> frozenset[int]:
    return frozenset(word.indices[-1] for word in positive_class(w, max_size) if len(word))


def monoid_equal_oracle(w1: BraidWord, w2: BraidWord, max_size: int = DEFAULT_CLASS_BUDGET) -> bool:
    if w1.strands != w2.strands:
        raise StrandMismatchError(f"words on {w1.strands} and {w2.strands} strands")
    w2.require_positive("monoid_equal_oracle")
    if len(w1) != len(w2):
        return False
    return w2 in positive_class(w1, max_size)


def left_weighted_factorization_oracle(
    w: BraidWord, max_size: int = DEFAULT_CLASS_BUDGET
) -> Factorization:
    """Exhaustive search over every split of every word in the class.

    Returns the admissible split with the longest ``tau`` (ties broken by
    the smallest index sequence).
    """
    n = w.strands
    starts: dict[tuple[int, ...], frozenset[int]] = {}
    finishes: dict[tuple[int, ...], frozenset[int]] = {}

    def _start(word: tuple[int, ...]) -> frozenset[int]:
        if word not in starts:
            starts[word] = starting_set_oracle(BraidWord.positive(n, word), max_size)
        return starts[word]

    def _finish(word: tuple[int, ...]) -> frozenset[int]:
        if word not in finishes:
            finishes[word] = finishing_set_oracle(BraidWord.positive(n, word), max_size)
        return finishes[word]

    best: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    for word in sorted(x.indices for x in positive_class(w, max_size)):
        for k in range(len(word), -1, -1):
            if best is not None and k <= len(best[0]):
                break
            tau, omega = word[:k], word[k:]
            if not is_minimal(BraidWord.positive(n, tau)):
                continue
            if _start(omega) <= _finish(tau):
                best = (tau, omega)
                break
    assert best is not None
    return Factorization(BraidWord.positive(n, best[0]), BraidWord.positive(n, best[1]))
