"""The YB/C/V reduction calculus on positive braid words.

Reductions rewrite a positive word in place:

* ``YB+`` at ``p``: ``σ_i σ_{i+1} σ_i`` becomes ``σ_{i+1} σ_i σ_{i+1}``
* ``YB-`` at ``p``: the reverse move
* ``C`` at ``p``: ``σ_i σ_j`` becomes ``σ_j σ_i`` for ``|i - j| > 1``
* ``V`` at ``p``: ``σ_i σ_i`` is deleted

plus composite forms of YB and C that slide a power ``σ^n`` through a
triple or a letter. Every reduction records the generator indices it acted
on so traces can be replayed and checked letter for letter.
"""

from __future__ import annotations

import logging
import re
from collections import deque
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Iterable, Mapping, Protocol

from .braid_core import (
    DEFAULT_CLASS_BUDGET,
    BraidError,
    BraidWord,
    Permutation,
    format_word,
    is_minimal,
    left_normal_form,
    left_weighted_factorization,
    monoid_equal,
    move_neighbours,
    parse_word,
    permutation_braid,
    starting_set,
    underlying_permutation,
)
from .text_format import FormatError, TraceFormatError

logger = logging.getLogger(__name__)

DEFAULT_CONFLUENCE_BUDGET = 2_000


class RewriteError(BraidError):
    """Error while applying or searching for reductions."""

    pass


class RedexMismatchError(RewriteError):
    """A reduction does not match the word at its position."""

    pass


class UnsupportedReductionError(RewriteError):
    """The reduction kind is not allowed for this operation."""

    pass


class MovePathNotFoundError(RewriteError):
    """No YB/C path between two words was found within the budget."""

    pass


class MarkingError(RewriteError):
    """A marking is not valid on the word it is used with."""

    pass


class ReductionKind(Enum):
    YB_UP = "YB+"
    YB_DOWN = "YB-"
    C = "C"
    V = "V"
    YB_UP_N = "YB+^"
    YB_UP_N_LEFT = "^YB+"
    YB_DOWN_N = "YB-^"
    YB_DOWN_N_LEFT = "^YB-"
    C_N = "C^"
    C_N_LEFT = "^C"

    @property
    def basic(self) -> ReductionKind:
        return _BASIC_OF[self]

    @property
    def is_composite(self) -> bool:
        return self not in _BASIC_KINDS

    @property
    def power_on_left(self) -> bool:
        return self.value.startswith("^")


_BASIC_KINDS = (ReductionKind.YB_UP, ReductionKind.YB_DOWN, ReductionKind.C, ReductionKind.V)

_BASIC_OF = {
    ReductionKind.YB_UP: ReductionKind.YB_UP,
    ReductionKind.YB_DOWN: ReductionKind.YB_DOWN,
    ReductionKind.C: ReductionKind.C,
    ReductionKind.V: ReductionKind.V,
    ReductionKind.YB_UP_N: ReductionKind.YB_UP,
    ReductionKind.YB_UP_N_LEFT: ReductionKind.YB_UP,
    ReductionKind.YB_DOWN_N: ReductionKind.YB_DOWN,
    ReductionKind.YB_DOWN_N_LEFT: ReductionKind.YB_DOWN,
    ReductionKind.C_N: ReductionKind.C,
    ReductionKind.C_N_LEFT: ReductionKind.C,
}


@dataclass(frozen=True)
class BasicReduction:
    """One reduction step.

    ``i`` is the smaller generator index of a YB triple, the left letter of
    a C swap, or the cancelled generator of a V. It may be ``None`` for a
    YB step parsed from text; ``resolve`` fills it in from the word.
    ``via`` records the composite reduction a basic step was expanded from.
    """

    kind: ReductionKind
    position: int
    i: int | None = None
    j: int | None = None
    power: int = 1
    via: BasicReduction | None = None

    def __post_init__(self) -> None:
        if self.position < 0:
            raise RewriteError(f"negative reduction position {self.position}")
        if self.power < 1:
            raise RewriteError(f"composite power must be >= 1, got {self.power}")
        if self.kind.is_composite and self.power == 1:
            object.__setattr__(self, "kind", self.kind.basic)
        if not self.kind.is_composite and self.power != 1:
            raise RewriteError(f"{self.kind.value} takes no power")
        if self.kind.basic is ReductionKind.C and self.i is not None and self.j is not None:
            if abs(self.i - self.j) <= 1:
                raise RewriteError(f"C needs distant generators, got ({self.i},{self.j})")

    @property
    def is_composite(self) -> bool:
        return self.kind.is_composite

    def to_dict(self) -> dict[str, Any]:
        result: dict[str, Any] = {
            "kind": self.kind.name,
            "position": self.position,
            "i": self.i,
            "j": self.j,
            "power": self.power,
        }
        if self.via is not None:
            result["via"] = format_step(self.via)
        return result

    def __str__(self) -> str:
        return format_step(self)


# ---------------------------------------------------------------------------
# Redex patterns
# ---------------------------------------------------------------------------


def _rewrite_rule(r: BasicReduction, i: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Left- and right-hand sides of ``r`` for smaller index ``i``."""
    n = r.power
    j = r.j
    k = i + 1
    match r.kind:
        case ReductionKind.YB_UP:
            return (i, k, i), (k, i, k)
        case ReductionKind.YB_DOWN:
            return (k, i, k), (i, k, i)
        case ReductionKind.C:
            return (i, j), (j, i)
        case ReductionKind.V:
            return (i, i), ()
        case ReductionKind.YB_UP_N:
            return (i, k) + (i,) * n, (k,) * n + (i, k)
        case ReductionKind.YB_UP_N_LEFT:
            return (i,) * n + (k, i), (k, i) + (k,) * n
        case ReductionKind.YB_DOWN_N:
            return (k, i) + (k,) * n, (i,) * n + (k, i)
        case ReductionKind.YB_DOWN_N_LEFT:
            return (k,) * n + (i, k), (i, k) + (i,) * n
        case ReductionKind.C_N:
            return (i,) + (j,) * n, (j,) * n + (i,)
        case ReductionKind.C_N_LEFT:
            return (i,) * n + (j,), (j,) + (i,) * n
    raise UnsupportedReductionError(f"unknown reduction kind {r.kind}")


def resolve(w: BraidWord, r: BasicReduction) -> BasicReduction:
    """Fill in the generator indices of ``r`` from the letters of ``w``.

    Raises:
        RedexMismatchError: If ``r`` does not match ``w`` at its position.
    """
    w.require_positive("resolve")
    letters = w.indices
    p = r.position
    if p >= len(letters):
        raise RedexMismatchError(f"position {p} is past the end of {format_word(w)}")
    basic = r.kind.basic
    if r.i is not None:
        i = r.i
    elif basic is ReductionKind.YB_DOWN:
        i = letters[p] - 1
    else:
        i = letters[p]
    j = r.j
    if basic is ReductionKind.C:
        if j is None:
            offset = r.power if r.kind.power_on_left else 1
            if p + offset >= len(letters):
                raise RedexMismatchError(f"C redex at {p} runs past the end of {format_word(w)}")
            j = letters[p + offset]
        if abs(i - j) <= 1:
            raise RedexMismatchError(
                f"C redex at position {p} needs distant generators, found ({i},{j})"
            )
    resolved = r if (i, j) == (r.i, r.j) else replace(r, i=i, j=j)
    lhs, _ = _rewrite_rule(resolved, i)
    found = letters[p : p + len(lhs)]
    if found != lhs:
        raise RedexMismatchError(
            f"{resolved.kind.value} redex mismatch at position {p}: expected "
            f"{_pattern_text(lhs)}, found {_pattern_text(found)}"
        )
    return resolved


def _pattern_text(letters: Iterable[int]) -> str:
    return " ".join(f"s{i}" for i in letters) or "(end of word)"


def apply_basic(w: BraidWord, r: BasicReduction) -> BraidWord:
    """Rewrite ``w`` by ``r``; composite kinds rewrite the whole block at once."""
    resolved = resolve(w, r)
    lhs, rhs = _rewrite_rule(resolved, resolved.i)
    letters = w.indices
    p = resolved.position
    return BraidWord.positive(w.strands, letters[:p] + rhs + letters[p + len(lhs) :])


def enumerate_redexes(w: BraidWord) -> list[BasicReduction]:
    """All basic (non-composite) redexes, left to right, in kind order YB+, YB-, C, V."""
    w.require_positive("enumerate_redexes")
    letters = w.indices
    found: list[BasicReduction] = []
    for p in range(len(letters) - 1):
        a, b = letters[p], letters[p + 1]
        if p + 2 < len(letters) and letters[p + 2] == a:
            if b == a + 1:
                found.append(BasicReduction(ReductionKind.YB_UP, p, a))
            elif b == a - 1:
                found.append(BasicReduction(ReductionKind.YB_DOWN, p, b))
        if abs(a - b) > 1:
            found.append(BasicReduction(ReductionKind.C, p, a, b))
        if a == b:
            found.append(BasicReduction(ReductionKind.V, p, a))
    return found


def expand_composite(w: BraidWord, r: BasicReduction) -> list[BasicReduction]:
    """The basic YB or C steps realizing ``r`` on ``w``, each annotated with ``via``."""
    resolved = resolve(w, r)
    if not resolved.is_composite:
        return [resolved]
    n = resolved.power
    basic = resolved.kind.basic
    offsets = range(n - 1, -1, -1) if resolved.kind.power_on_left else range(n)
    return [
        BasicReduction(basic, resolved.position + k, resolved.i, resolved.j, via=resolved)
        for k in offsets
    ]


def inverse_reduction(w: BraidWord, r: BasicReduction) -> BasicReduction:
    """The move undoing ``r``, to be applied to ``apply_basic(w, r)``.

    Raises:
        UnsupportedReductionError: For V and composite reductions.
    """
    resolved = resolve(w, r)
    match resolved.kind:
        case ReductionKind.YB_UP:
            return BasicReduction(ReductionKind.YB_DOWN, resolved.position, resolved.i)
        case ReductionKind.YB_DOWN:
            return BasicReduction(ReductionKind.YB_UP, resolved.position, resolved.i)
        case ReductionKind.C:
            return BasicReduction(ReductionKind.C, resolved.position, resolved.j, resolved.i)
    raise UnsupportedReductionError(f"{resolved.kind.value} has no inverse move")


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReductionTrace:
    """A replayable chain of basic reductions from ``source`` to ``target``."""

    source: BraidWord
    steps: tuple[BasicReduction, ...]
    target: BraidWord

    @classmethod
    def from_reductions(cls, source: BraidWord, reductions: Iterable[BasicReduction]) -> ReductionTrace:
        """Apply ``reductions`` in order, expanding composites into annotated basic steps."""
        steps: list[BasicReduction] = []
        current = source
        for r in reductions:
            for step in expand_composite(current, r):
                steps.append(step)
                current = apply_basic(current, step)
        return cls(source, tuple(steps), current)

    @property
    def v_count(self) -> int:
        return sum(1 for step in self.steps if step.kind is ReductionKind.V)

    def to_dict(self) -> dict[str, Any]:
        return {
            "source": format_word(self.source),
            "target": format_word(self.target),
            "steps": [format_step(step) for step in self.steps],
            "v_count": self.v_count,
        }

    def __str__(self) -> str:
        return format_trace(self)


@dataclass(frozen=True)
class TraceCheck:
    """Outcome of replaying a trace."""

    ok: bool
    failed_step: int | None = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict[str, Any]:
        return {"ok": self.ok, "failed_step": self.failed_step, "message": self.message}


def verify_trace(t: ReductionTrace) -> TraceCheck:
    """Replay ``t`` from its source. A final mismatch reports ``failed_step == len(steps)``."""
    current = t.source
    for k, step in enumerate(t.steps):
        try:
            current = apply_basic(current, step)
        except BraidError as e:
            return TraceCheck(False, k, f"step {k} ({format_step(step)}): {e}")
    if current != t.target:
        return TraceCheck(
            False,
            len(t.steps),
            f"replay ends at {format_word(current)}, trace claims {format_word(t.target)}",
        )
    return TraceCheck(True)


def reduction_length(t: ReductionTrace) -> int:
    """Number of V steps in ``t``."""
    return t.v_count


# ---------------------------------------------------------------------------
# Move paths and complete reduction
# ---------------------------------------------------------------------------


class MovePathFinder(Protocol):
    def __call__(self, source: BraidWord, target: BraidWord, budget: int) -> list[BasicReduction]: ...


def _move_step(before: tuple[int, ...], position: int) -> BasicReduction:
    a, b = before[position], before[position + 1]
    if abs(a - b) > 1:
        return BasicReduction(ReductionKind.C, position, a, b)
    if b == a + 1:
        return BasicReduction(ReductionKind.YB_UP, position, a)
    return BasicReduction(ReductionKind.YB_DOWN, position, b)


def find_move_path(
    source: BraidWord, target: BraidWord, budget: int = DEFAULT_CLASS_BUDGET
) -> list[BasicReduction]:
    """Shortest YB/C step list turning ``source`` into ``target`` (bidirectional BFS).

    Raises:
        MovePathNotFoundError: If the words are not connected within ``budget`` visited words.
    """
    if source.strands != target.strands or len(source) != len(target):
        raise MovePathNotFoundError(
            f"no move path from {format_word(source)} to {format_word(target)}: shapes differ"
        )
    start, goal = source.indices, target.indices
    if start == goal:
        return []
    # word -> (previous word, position of the move from previous to word)
    forward: dict[tuple[int, ...], tuple[tuple[int, ...], int] | None] = {start: None}
    backward: dict[tuple[int, ...], tuple[tuple[int, ...], int] | None] = {goal: None}
    front, back = [start], [goal]
    meet: tuple[int, ...] | None = None
    while front and back and meet is None:
        if len(forward) + len(backward) > budget:
            break
        grow_forward = len(front) <= len(back)
        layer, seen, other = (front, forward, backward) if grow_forward else (back, backward, forward)
        next_layer: list[tuple[int, ...]] = []
        for word in layer:
            for position, nxt in move_neighbours(word):
                if nxt in seen:
                    continue
                seen[nxt] = (word, position)
                if nxt in other:
                    meet = nxt
                    break
                next_layer.append(nxt)
            if meet is not None:
                break
        if grow_forward:
            front = next_layer
        else:
            back = next_layer
    if meet is None:
        raise MovePathNotFoundError(
            f"no move path from {format_word(source)} to {format_word(target)} "
            f"within budget {budget}"
        )

    head: list[BasicReduction] = []
    node = meet
    while forward[node] is not None:
        prev, position = forward[node]
        head.append(_move_step(prev, position))
        node = prev
    head.reverse()

    tail: list[BasicReduction] = []
    node = meet
    while backward[node] is not None:
        prev, position = backward[node]
        # moves are involutive on position: undo prev -> node at the same place
        tail.append(_move_step(node, position))
        node = prev
    logger.debug(
        "move path %s -> %s: %d steps, %d words visited",
        format_word(source),
        format_word(target),
        len(head) + len(tail),
        len(forward) + len(backward),
    )
    return head + tail


def complete_reduce(
    w: BraidWord,
    *,
    budget: int = DEFAULT_CLASS_BUDGET,
    path_finder: MovePathFinder = find_move_path,
) -> ReductionTrace:
    """Reduce ``w`` to a minimal word, recording every move.

    Each round splits the word as ``tau · omega``, takes the smallest
    ``i`` in the starting set of ``omega``, moves the word to
    ``tau' σ_i σ_i omega'`` by YB/C steps and cancels the square.
    """
    w.require_positive("complete_reduce")
    n = w.strands
    steps: list[BasicReduction] = []
    current = w
    while True:
        factorization = left_weighted_factorization(current)
        if not len(factorization.omega):
            break
        i = min(starting_set(factorization.omega))
        s_i = Permutation.transposition(n, i)
        tau_prime = permutation_braid(underlying_permutation(factorization.tau).then(s_i))
        first, *rest = left_normal_form(factorization.omega)
        staged = tau_prime.concat(BraidWord.positive(n, (i, i)))
        staged = staged.concat(permutation_braid(s_i.then(first)))
        for factor in rest:
            staged = staged.concat(permutation_braid(factor))
        path = path_finder(current, staged, budget)
        for step in path:
            current = apply_basic(current, step)
        if current != staged:
            raise MovePathNotFoundError(
                f"move path ended at {format_word(current)}, expected {format_word(staged)}"
            )
        cancel = BasicReduction(ReductionKind.V, len(tau_prime), i)
        current = apply_basic(current, cancel)
        steps.extend(path)
        steps.append(cancel)
        logger.debug(
            "complete_reduce round: tau=%s omega=%s i=%d moves=%d",
            format_word(factorization.tau),
            format_word(factorization.omega),
            i,
            len(path),
        )
    return ReductionTrace(w, tuple(steps), current)


def normalize(
    w: BraidWord,
    *,
    budget: int = DEFAULT_CLASS_BUDGET,
    path_finder: MovePathFinder = find_move_path,
) -> ReductionTrace:
    """Complete reduction followed by moves onto ``permutation_braid(π(w))``."""
    reduced = complete_reduce(w, budget=budget, path_finder=path_finder)
    canonical = permutation_braid(underlying_permutation(w))
    tail = path_finder(reduced.target, canonical, budget)
    return ReductionTrace(w, reduced.steps + tuple(tail), canonical)


# ---------------------------------------------------------------------------
# Markings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Marking:
    """Labels attached to pairs of letter positions in a word."""

    positions: Mapping[str, tuple[int, int]]

    def __post_init__(self) -> None:
        normalized = {label: (int(a), int(b)) for label, (a, b) in self.positions.items()}
        for label, (a, b) in normalized.items():
            if a == b:
                raise MarkingError(f"label {label!r} marks position {a} twice")
        object.__setattr__(self, "positions", normalized)

    @property
    def labels(self) -> frozenset[str]:
        return frozenset(self.positions)

    def __getitem__(self, label: str) -> tuple[int, int]:
        return self.positions[label]

    def validate(self, w: BraidWord) -> None:
        for label, (a, b) in self.positions.items():
            if not (0 <= a < len(w) and 0 <= b < len(w)):
                raise MarkingError(
                    f"label {label!r} marks ({a},{b}) outside word of length {len(w)}"
                )

    def to_dict(self) -> dict[str, list[int]]:
        return {label: list(pair) for label, pair in sorted(self.positions.items())}


def _position_map(r: BasicReduction) -> dict[int, int]:
    p = r.position
    if r.kind.basic in (ReductionKind.YB_UP, ReductionKind.YB_DOWN):
        return {p: p + 2, p + 2: p}
    if r.kind.basic is ReductionKind.C:
        return {p: p + 1, p + 1: p}
    raise UnsupportedReductionError(f"markings cannot be transferred across {r.kind.value}")


def transfer_marking(m: Marking, w: BraidWord, r: BasicReduction) -> Marking:
    """Carry ``m`` from ``w`` to ``apply_basic(w, r)``.

    YB exchanges the marks on the outer letters of the triple and C swaps
    the marks on its two letters. Composite reductions are transferred step
    by step.
    """
    if r.kind.basic is ReductionKind.V:
        raise UnsupportedReductionError("markings cannot be transferred across a V reduction")
    m.validate(w)
    current = w
    positions = dict(m.positions)
    for step in expand_composite(current, r):
        moves = _position_map(step)
        positions = {
            label: (moves.get(a, a), moves.get(b, b)) for label, (a, b) in positions.items()
        }
        current = apply_basic(current, step)
    return Marking(positions)


def transfer_along(
    m: Marking, w: BraidWord, steps: Iterable[BasicReduction]
) -> tuple[Marking, BraidWord]:
    """Transfer ``m`` along a YB/C step list; returns the final marking and word."""
    current = w
    for step in steps:
        m = transfer_marking(m, current, step)
        current = apply_basic(current, step)
    return m, current


def pullback_marking(m: Marking, w: BraidWord, steps: Iterable[BasicReduction]) -> Marking:
    """Carry ``m`` (on the word reached from ``w`` by ``steps``) back onto ``w``."""
    words = [w]
    basic: list[BasicReduction] = []
    for step in steps:
        for part in expand_composite(words[-1], step):
            basic.append(part)
            words.append(apply_basic(words[-1], part))
    m.validate(words[-1])
    for k in range(len(basic) - 1, -1, -1):
        undo = inverse_reduction(words[k], basic[k])
        m = transfer_marking(m, words[k + 1], undo)
    return m


def distance(m: Marking) -> dict[str, int]:
    """Absolute distance between the two marked positions of each label."""
    return {label: abs(a - b) for label, (a, b) in m.positions.items()}


class GenericCase(Enum):
    BOTH_SHARED = "BothShared"
    ONE_SHARED = "OneShared"
    DISJOINT = "Disjoint"


@dataclass(frozen=True)
class GenericSituation:
    """A V redex, a YB/C path, and a second V redex at the end of the path."""

    word: BraidWord
    reductions: tuple[BasicReduction, ...]
    v: BasicReduction
    v_prime: BasicReduction
    canonical_marking: Marking

    def to_dict(self) -> dict[str, Any]:
        return {
            "word": format_word(self.word),
            "reductions": [format_step(r) for r in self.reductions],
            "v": format_step(self.v),
            "v_prime": format_step(self.v_prime),
            "canonical_marking": self.canonical_marking.to_dict(),
        }


def generic_situation(
    word: BraidWord,
    reductions: Iterable[BasicReduction],
    v: BasicReduction,
    v_prime: BasicReduction,
) -> GenericSituation:
    """Build a generic situation and its canonical marking.

    ``x`` marks the letters cancelled by ``v``; ``y`` marks the letters of
    ``word`` that the path carries onto the letters cancelled by ``v_prime``.
    """
    if v.kind is not ReductionKind.V or v_prime.kind is not ReductionKind.V:
        raise UnsupportedReductionError("v and v_prime must be V reductions")
    reductions = tuple(reductions)
    if any(r.kind.basic is ReductionKind.V for r in reductions):
        raise UnsupportedReductionError("the path of a generic situation may only use YB and C")
    v = resolve(word, v)
    end = word
    for r in reductions:
        end = apply_basic(end, r)
    v_prime = resolve(end, v_prime)
    x = (v.position, v.position + 1)
    y = pullback_marking(Marking({"y": (v_prime.position, v_prime.position + 1)}), word, reductions)["y"]
    marking = Marking({"x": x, "y": y})
    return GenericSituation(word, reductions, v, v_prime, marking)


def classify_generic(g: GenericSituation) -> GenericCase:
    """How the two cancelled pairs overlap in the original word."""
    shared = len(set(g.canonical_marking["x"]) & set(g.canonical_marking["y"]))
    if shared == 2:
        return GenericCase.BOTH_SHARED
    if shared == 1:
        return GenericCase.ONE_SHARED
    return GenericCase.DISJOINT


# ---------------------------------------------------------------------------
# Confluence harness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConfluenceReport:
    """Results of exploring every reduction strategy from one word."""

    source: BraidWord
    states_explored: int
    targets: tuple[BraidWord, ...]
    v_counts: tuple[int, ...]
    expected_v_count: int
    max_reduction_length: int
    diamonds_checked: int
    targets_agree: bool
    v_count_rigid: bool
    diamonds_rejoin: bool
    failures: tuple[str, ...]
    partial: bool

    @property
    def passed(self) -> bool:
        return self.targets_agree and self.v_count_rigid and self.diamonds_rejoin

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict[str, Any]:
        return {
            "source": format_word(self.source),
            "passed": self.passed,
            "partial": self.partial,
            "states_explored": self.states_explored,
            "targets": [format_word(t) for t in self.targets],
            "v_counts": list(self.v_counts),
            "expected_v_count": self.expected_v_count,
            "max_reduction_length": self.max_reduction_length,
            "diamonds_checked": self.diamonds_checked,
            "targets_agree": self.targets_agree,
            "v_count_rigid": self.v_count_rigid,
            "diamonds_rejoin": self.diamonds_rejoin,
            "failures": list(self.failures),
        }


def check_confluence(
    w: BraidWord,
    budget: int = DEFAULT_CONFLUENCE_BUDGET,
    *,
    class_budget: int = DEFAULT_CLASS_BUDGET,
) -> ConfluenceReport:
    """Explore every word reachable from ``w`` by single reductions and check that
    all complete reductions agree.

    For each reachable state the V-count so far plus the V-count of its
    complete reduction must equal ``(len(w) - inversions(π(w))) / 2``, every
    target must be minimal and monoid-equal to the first, and the two
    one-step reducts of every pair of redexes must complete to equal targets
    with equal total V-counts. Exploration stops after ``budget`` states and
    the report is flagged partial.
    """
    w.require_positive("check_confluence")
    expected = (len(w) - underlying_permutation(w).inversions()) // 2
    completions: dict[tuple[int, ...], ReductionTrace] = {}

    def _complete(word: BraidWord) -> ReductionTrace:
        if word.indices not in completions:
            completions[word.indices] = complete_reduce(word, budget=class_budget)
        return completions[word.indices]

    reference = _complete(w).target
    targets: dict[tuple[int, ...], BraidWord] = {}
    v_counts: set[int] = set()
    targets_agree = v_count_rigid = diamonds_rejoin = True
    failures: list[str] = []
    diamonds = 0
    seen = {w.indices}
    queue = deque([w])
    explored = 0
    partial = False
    while queue:
        if explored >= budget:
            partial = True
            break
        state = queue.popleft()
        explored += 1
        # every V removes two letters, so the V-steps spent so far are fixed by length
        spent = (len(w) - len(state)) // 2
        trace = _complete(state)
        total = spent + trace.v_count
        targets.setdefault(trace.target.indices, trace.target)
        v_counts.add(total)
        if not is_minimal(trace.target) or not monoid_equal(trace.target, reference):
            targets_agree = False
            failures.append(
                f"target {format_word(trace.target)} from {format_word(state)} "
                f"differs from {format_word(reference)}"
            )
        if total != expected:
            v_count_rigid = False
            failures.append(f"v-count {total} via {format_word(state)} (expected {expected})")

        reducts = [(r, apply_basic(state, r)) for r in enumerate_redexes(state)]
        for k, (r1, w1) in enumerate(reducts):
            for r2, w2 in reducts[k + 1 :]:
                diamonds += 1
                t1, t2 = _complete(w1), _complete(w2)
                v1 = t1.v_count + (r1.kind is ReductionKind.V)
                v2 = t2.v_count + (r2.kind is ReductionKind.V)
                if not monoid_equal(t1.target, t2.target) or v1 != v2:
                    diamonds_rejoin = False
                    failures.append(
                        f"diamond at {format_word(state)}: {format_step(r1)} and "
                        f"{format_step(r2)} do not rejoin"
                    )
        for _, nxt in reducts:
            if nxt.indices not in seen:
                seen.add(nxt.indices)
                queue.append(nxt)
    logger.debug(
        "check_confluence %s: %d states, %d diamonds, partial=%s",
        format_word(w),
        explored,
        diamonds,
        partial,
    )
    return ConfluenceReport(
        source=w,
        states_explored=explored,
        targets=tuple(targets[key] for key in sorted(targets)),
        v_counts=tuple(sorted(v_counts)),
        expected_v_count=expected,
        max_reduction_length=max(v_counts, default=0),
        diamonds_checked=diamonds,
        targets_agree=targets_agree,
        v_count_rigid=v_count_rigid,
        diamonds_rejoin=diamonds_rejoin,
        failures=tuple(failures),
        partial=partial,
    )


def max_reduction_length(w: BraidWord, budget: int = DEFAULT_CONFLUENCE_BUDGET) -> int:
    """The longest V-count over all explored complete reductions of ``w``."""
    return check_confluence(w, budget).max_reduction_length


# ---------------------------------------------------------------------------
# Trace text format
# ---------------------------------------------------------------------------

_STEP_RE = re.compile(
    r"^(?P<kind>\^\d+(?:YB[+-]|C)|(?:YB[+-]|C)\^\d+|YB[+-]|C|V)"
    r" @(?P<pos>\d+)"
    r"(?: \((?P<i>\d+)(?:,(?P<j>\d+))?\))?$"
)


def format_step(r: BasicReduction) -> str:
    """Print one step, e.g. ``YB+ @3``, ``C @2 (1,3)``, ``V @5 (2)``, ``YB+^3 @0 (1)``."""
    base = r.kind.basic.value
    if r.is_composite:
        token = f"^{r.power}{base}" if r.kind.power_on_left else f"{base}^{r.power}"
    else:
        token = base
    text = f"{token} @{r.position}"
    basic = r.kind.basic
    if basic is ReductionKind.C:
        text += f" ({r.i},{r.j})"
    elif basic is ReductionKind.V or (r.is_composite and r.i is not None):
        text += f" ({r.i})"
    if r.via is not None:
        text += f" via {format_step(r.via)}"
    return text


def _kind_for(token: str) -> tuple[ReductionKind, int]:
    if token in ("YB+", "YB-", "C", "V"):
        return ReductionKind(token), 1
    if token.startswith("^"):
        digits = token[1:].rstrip("YB+-C")
        base = token[1 + len(digits) :]
        return ReductionKind("^" + base), int(digits)
    base, _, digits = token.partition("^")
    return ReductionKind(base + "^"), int(digits)


def parse_step(text: str, line: int = 1) -> BasicReduction:
    """Parse one step line (with an optional ``via`` annotation)."""
    main, _, via_text = text.partition(" via ")
    match = _STEP_RE.match(main)
    if match is None:
        raise TraceFormatError(f"invalid step {main!r}", line, 1)
    kind, power = _kind_for(match["kind"])
    i = int(match["i"]) if match["i"] is not None else None
    j = int(match["j"]) if match["j"] is not None else None
    if kind.basic is ReductionKind.C and j is None:
        raise TraceFormatError("C step needs (i,j)", line, match.start("pos") + 1)
    if kind is ReductionKind.V and i is None:
        raise TraceFormatError("V step needs (i)", line, match.start("pos") + 1)
    if kind in (ReductionKind.YB_UP, ReductionKind.YB_DOWN) and i is not None:
        raise TraceFormatError(f"{kind.value} step takes no index", line, match.start("i"))
    if kind.basic is not ReductionKind.C and j is not None:
        raise TraceFormatError(f"{kind.basic.value} step takes one index", line, match.start("j"))
    via = parse_step(via_text, line) if via_text else None
    try:
        return BasicReduction(kind, int(match["pos"]), i, j, power, via)
    except RewriteError as e:
        raise TraceFormatError(str(e), line, 1) from e


def format_trace(t: ReductionTrace) -> str:
    lines = [f"source: {format_word(t.source)}", f"target: {format_word(t.target)}"]
    lines.extend(format_step(step) for step in t.steps)
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> ReductionTrace:
    """Parse the trace text format.

    YB steps carry no generator index in text; they are resolved by
    replaying from the source while the replay succeeds, so a tampered
    trace still parses and is rejected later by ``verify_trace``.
    """
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if len(lines) < 2:
        raise TraceFormatError("expected 'source:' and 'target:' header lines", len(lines) + 1, 1)
    headers = {}
    for number, key in ((1, "source"), (2, "target")):
        prefix = f"{key}: "
        if not lines[number - 1].startswith(prefix):
            raise TraceFormatError(f"expected '{prefix.strip()}' header", number, 1)
        try:
            headers[key] = parse_word(lines[number - 1][len(prefix) :], number)
        except FormatError as e:
            raise TraceFormatError(e.message, number, (e.column or 0) + len(prefix)) from e
    steps = [parse_step(line, number) for number, line in enumerate(lines[2:], start=3)]

    resolved: list[BasicReduction] = []
    current: BraidWord | None = headers["source"]
    for step in steps:
        if current is not None:
            try:
                fixed = resolve(current, step)
                current = apply_basic(current, fixed)
                step = fixed
            except BraidError:
                current = None
        resolved.append(step)
    return ReductionTrace(headers["source"], tuple(resolved), headers["target"])
