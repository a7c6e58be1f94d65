"""Objects and 1-cells of the free symmetric monoidal bicategory on a set of labels.

Cells are syntax trees. Two functors read them: ``pi_functor`` lands in
permutations and ``rho_functor`` lands in braid words, with
``underlying_permutation(rho_functor(f)) == pi_functor(f)``. ``coherent``
decides whether two parallel cells are isomorphic and, when they are,
returns a certificate made of two replayable reduction traces.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Union

from .braid_core import (
    BraidError,
    BraidWord,
    Permutation,
    format_word,
    is_minimal,
    underlying_permutation,
)
from .rewrite_engine import ReductionTrace, format_trace, normalize, verify_trace
from .text_format import Atom, SExpr, SList, TermParseError, read_sexpr


class TermError(Exception):
    """Error in a term of the free construction."""

    pass


class TermTypeError(TermError):
    """A cell is ill-typed; ``path`` locates the offending subterm."""

    def __init__(self, message: str, path: str):
        super().__init__(f"at {path}: {message}")
        self.path = path


class NotParallelError(TermError):
    """Two cells do not share source and target labels."""

    pass


# ---------------------------------------------------------------------------
# Objects
# ---------------------------------------------------------------------------


class _ObjOps:
    def __matmul__(self, other: ObjExpr) -> Tensor:
        return Tensor(self, other)  # type: ignore[arg-type]

    def __str__(self) -> str:
        return format_obj(self)  # type: ignore[arg-type]


@dataclass(frozen=True)
class Unit(_ObjOps):
    """The monoidal unit ``I``."""


@dataclass(frozen=True)
class Gen(_ObjOps):
    label: str


@dataclass(frozen=True)
class Tensor(_ObjOps):
    left: ObjExpr
    right: ObjExpr


ObjExpr = Union[Unit, Gen, Tensor]


def flatten(x: ObjExpr) -> tuple[str, ...]:
    """Generator labels left to right; units contribute nothing."""
    match x:
        case Unit():
            return ()
        case Gen(label):
            return (label,)
        case Tensor(left, right):
            return flatten(left) + flatten(right)
    raise TermError(f"not an object: {x!r}")


# ---------------------------------------------------------------------------
# Cells
# ---------------------------------------------------------------------------


class _CellOps:
    def then(self, other: CellExpr) -> Compose:
        """``self`` followed by ``other``."""
        return Compose(other, self)  # type: ignore[arg-type]

    def __rshift__(self, other: CellExpr) -> Compose:
        return self.then(other)

    def __matmul__(self, other: CellExpr) -> TensorCell:
        return TensorCell(self, other)  # type: ignore[arg-type]

    def __str__(self) -> str:
        return format_cell(self)  # type: ignore[arg-type]


@dataclass(frozen=True)
class Id(_CellOps):
    obj: ObjExpr


@dataclass(frozen=True)
class Assoc(_CellOps):
    x: ObjExpr
    y: ObjExpr
    z: ObjExpr


@dataclass(frozen=True)
class AssocInv(_CellOps):
    x: ObjExpr
    y: ObjExpr
    z: ObjExpr


@dataclass(frozen=True)
class LUnit(_CellOps):
    x: ObjExpr


@dataclass(frozen=True)
class LUnitInv(_CellOps):
    x: ObjExpr


@dataclass(frozen=True)
class RUnit(_CellOps):
    x: ObjExpr


@dataclass(frozen=True)
class RUnitInv(_CellOps):
    x: ObjExpr


@dataclass(frozen=True)
class Braid(_CellOps):
    x: ObjExpr
    y: ObjExpr


@dataclass(frozen=True)
class BraidInv(_CellOps):
    """The pseudo-inverse braiding: source ``x ⊗ y``, target ``y ⊗ x``."""

    x: ObjExpr
    y: ObjExpr


@dataclass(frozen=True)
class Compose(_CellOps):
    """``g ∘ f``: first ``f``, then ``g``."""

    g: CellExpr
    f: CellExpr


@dataclass(frozen=True)
class TensorCell(_CellOps):
    f: CellExpr
    g: CellExpr


CellExpr = Union[
    Id, Assoc, AssocInv, LUnit, LUnitInv, RUnit, RUnitInv, Braid, BraidInv, Compose, TensorCell
]


def typecheck(f: CellExpr) -> tuple[ObjExpr, ObjExpr]:
    """Source and target of ``f``.

    Raises:
        TermTypeError: If a composite does not match up; the error names the subterm path.
    """
    return _typecheck(f, "$")


def _typecheck(f: CellExpr, path: str) -> tuple[ObjExpr, ObjExpr]:
    match f:
        case Id(obj):
            return obj, obj
        case Assoc(x, y, z):
            return Tensor(Tensor(x, y), z), Tensor(x, Tensor(y, z))
        case AssocInv(x, y, z):
            return Tensor(x, Tensor(y, z)), Tensor(Tensor(x, y), z)
        case LUnit(x):
            return Tensor(Unit(), x), x
        case LUnitInv(x):
            return x, Tensor(Unit(), x)
        case RUnit(x):
            return Tensor(x, Unit()), x
        case RUnitInv(x):
            return x, Tensor(x, Unit())
        case Braid(x, y) | BraidInv(x, y):
            return Tensor(x, y), Tensor(y, x)
        case Compose(g, inner):
            source, middle = _typecheck(inner, f"{path}.f")
            arrival, target = _typecheck(g, f"{path}.g")
            if middle != arrival:
                raise TermTypeError(
                    f"target {format_obj(middle)} of f does not match source "
                    f"{format_obj(arrival)} of g",
                    path,
                )
            return source, target
        case TensorCell(left, right):
            s1, t1 = _typecheck(left, f"{path}.l")
            s2, t2 = _typecheck(right, f"{path}.r")
            return Tensor(s1, s2), Tensor(t1, t2)
    raise TermTypeError(f"not a cell: {f!r}", path)


def source(f: CellExpr) -> ObjExpr:
    return typecheck(f)[0]


def target(f: CellExpr) -> ObjExpr:
    return typecheck(f)[1]


# ---------------------------------------------------------------------------
# Functors
# ---------------------------------------------------------------------------


def pi_functor(f: CellExpr) -> Permutation:
    """The underlying permutation of a well-typed cell."""
    typecheck(f)
    return _pi(f)


def _pi(f: CellExpr) -> Permutation:
    match f:
        case Braid(x, y) | BraidInv(x, y):
            return Permutation.block_transposition(len(flatten(x)), len(flatten(y)))
        case Compose(g, inner):
            return _pi(inner).then(_pi(g))
        case TensorCell(left, right):
            return _pi(left).block_sum(_pi(right))
    return Permutation.identity(len(flatten(_typecheck(f, "$")[0])))


def _block_braid(n: int, m: int) -> BraidWord:
    """Positive braid taking a block of ``n`` strands over a block of ``m``.

    The rightmost strand of the first block crosses the whole second block
    first, then the next one, and so on.
    """
    indices = [k + step for k in range(n, 0, -1) for step in range(m)]
    return BraidWord.positive(n + m, indices)


def rho_functor(f: CellExpr) -> BraidWord:
    """The braid word of a well-typed cell; structural cells give the empty word."""
    typecheck(f)
    return _rho(f)


def _rho(f: CellExpr) -> BraidWord:
    match f:
        case Braid(x, y):
            return _block_braid(len(flatten(x)), len(flatten(y)))
        case BraidInv(x, y):
            return _block_braid(len(flatten(y)), len(flatten(x))).inverse()
        case Compose(g, inner):
            return _rho(inner).concat(_rho(g))
        case TensorCell(left, right):
            a, b = _rho(left), _rho(right)
            strands = a.strands + b.strands
            return a.shifted(0, strands).concat(b.shifted(a.strands, strands))
    return BraidWord.empty(len(flatten(_typecheck(f, "$")[0])))


def positivize(f: CellExpr) -> CellExpr:
    """Replace every pseudo-inverse braiding by the positive braiding with the same boundary."""
    match f:
        case BraidInv(x, y):
            return Braid(x, y)
        case Compose(g, inner):
            return Compose(positivize(g), positivize(inner))
        case TensorCell(left, right):
            return TensorCell(positivize(left), positivize(right))
    return f


# ---------------------------------------------------------------------------
# Coherence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Two complete reductions that end at the same minimal word."""

    f: CellExpr
    g: CellExpr
    trace_f: ReductionTrace
    trace_g: ReductionTrace
    common_target: BraidWord

    def to_dict(self) -> dict[str, Any]:
        return {
            "f": format_cell(self.f),
            "g": format_cell(self.g),
            "common_target": format_word(self.common_target),
            "trace_f": self.trace_f.to_dict(),
            "trace_g": self.trace_g.to_dict(),
        }

    def __str__(self) -> str:
        return format_certificate(self)


@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    failure: str | None = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict[str, Any]:
        return {"ok": self.ok, "failure": self.failure, "message": self.message}


def _require_parallel(f: CellExpr, g: CellExpr) -> None:
    sf, tf = typecheck(f)
    sg, tg = typecheck(g)
    if flatten(sf) != flatten(sg) or flatten(tf) != flatten(tg):
        raise NotParallelError(
            f"cells are not parallel: {format_obj(sf)} -> {format_obj(tf)} vs "
            f"{format_obj(sg)} -> {format_obj(tg)}"
        )


def coherent(f: CellExpr, g: CellExpr) -> Certificate | None:
    """Decide whether parallel cells ``f`` and ``g`` are isomorphic.

    Returns ``None`` when their permutations differ. Otherwise both
    positivized braid words are reduced to ``permutation_braid`` of the
    common permutation and the two traces are returned as a certificate.

    Raises:
        NotParallelError: If the sources have different labels, or if the
            permutations agree but the targets do not.
    """
    sf, sg = source(f), source(g)
    if flatten(sf) != flatten(sg):
        raise NotParallelError(f"sources differ: {format_obj(sf)} vs {format_obj(sg)}")
    if _pi(f) != _pi(g):
        return None
    _require_parallel(f, g)
    trace_f = normalize(_rho(positivize(f)))
    trace_g = normalize(_rho(positivize(g)))
    return Certificate(f, g, trace_f, trace_g, trace_f.target)


def verify_certificate(c: Certificate) -> CertificateCheck:
    """Re-check every claim of a certificate; names the first failing check."""
    try:
        _require_parallel(c.f, c.g)
    except TermError as e:
        return CertificateCheck(False, "parallel", str(e))
    checks = [
        ("source_f", lambda: c.trace_f.source == _rho(positivize(c.f))),
        ("source_g", lambda: c.trace_g.source == _rho(positivize(c.g))),
        ("replay_f", lambda: bool(verify_trace(c.trace_f))),
        ("replay_g", lambda: bool(verify_trace(c.trace_g))),
        ("target_f", lambda: c.trace_f.target == c.common_target),
        ("target_g", lambda: c.trace_g.target == c.common_target),
        ("minimal", lambda: is_minimal(c.common_target)),
        (
            "permutation",
            lambda: underlying_permutation(c.common_target) == _pi(c.f) == _pi(c.g),
        ),
    ]
    for name, check in checks:
        try:
            passed = check()
        except BraidError as e:
            return CertificateCheck(False, name, str(e))
        if not passed:
            return CertificateCheck(False, name, f"check {name} failed")
    return CertificateCheck(True)


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

_LABEL_RE = re.compile(r"^[A-Za-z0-9_.']+$")

_TERNARY = {"assoc": Assoc, "assoc*": AssocInv}
_UNARY = {"lunit": LUnit, "lunit*": LUnitInv, "runit": RUnit, "runit*": RUnitInv}
_BINARY_OBJ = {"braid": Braid, "braid*": BraidInv}
_BINARY_CELL = {"comp": Compose, "ten": TensorCell}
_NAMES = {
    Assoc: "assoc",
    AssocInv: "assoc*",
    LUnit: "lunit",
    LUnitInv: "lunit*",
    RUnit: "runit",
    RUnitInv: "runit*",
    Braid: "braid",
    BraidInv: "braid*",
}


def format_obj(x: ObjExpr) -> str:
    match x:
        case Unit():
            return "I"
        case Gen(label):
            return label
        case Tensor(left, right):
            return f"(tensor {format_obj(left)} {format_obj(right)})"
    raise TermError(f"not an object: {x!r}")


def format_cell(f: CellExpr) -> str:
    match f:
        case Id(obj):
            return f"(id {format_obj(obj)})"
        case Compose(g, inner):
            return f"(comp {format_cell(g)} {format_cell(inner)})"
        case TensorCell(left, right):
            return f"(ten {format_cell(left)} {format_cell(right)})"
    name = _NAMES.get(type(f))
    if name is None:
        raise TermError(f"not a cell: {f!r}")
    args = " ".join(format_obj(getattr(f, field)) for field in f.__dataclass_fields__)
    return f"({name} {args})"


def format_certificate(c: Certificate) -> str:
    return (
        f"f: {format_cell(c.f)}\n"
        f"g: {format_cell(c.g)}\n"
        f"common: {format_word(c.common_target)}\n"
        f"--- f\n{format_trace(c.trace_f)}"
        f"--- g\n{format_trace(c.trace_g)}"
    )


def _obj_from(expr: SExpr) -> ObjExpr:
    if isinstance(expr, Atom):
        if expr.text == "I":
            return Unit()
        if not _LABEL_RE.match(expr.text) or expr.text in _ALL_KEYWORDS:
            raise TermParseError(f"invalid generator label {expr.text!r}", expr.line, expr.column)
        return Gen(expr.text)
    head = _head(expr)
    if head != "tensor":
        raise TermParseError(f"expected an object, found ({head} ...)", expr.line, expr.column)
    left, right = _args(expr, 2)
    return Tensor(_obj_from(left), _obj_from(right))


def _cell_from(expr: SExpr) -> CellExpr:
    if isinstance(expr, Atom):
        raise TermParseError(f"expected a cell, found {expr.text!r}", expr.line, expr.column)
    head = _head(expr)
    if head == "id":
        (obj,) = _args(expr, 1)
        return Id(_obj_from(obj))
    if head in _TERNARY:
        return _TERNARY[head](*(_obj_from(a) for a in _args(expr, 3)))
    if head in _UNARY:
        (obj,) = _args(expr, 1)
        return _UNARY[head](_obj_from(obj))
    if head in _BINARY_OBJ:
        return _BINARY_OBJ[head](*(_obj_from(a) for a in _args(expr, 2)))
    if head in _BINARY_CELL:
        return _BINARY_CELL[head](*(_cell_from(a) for a in _args(expr, 2)))
    raise TermParseError(f"unknown constructor {head!r}", expr.line, expr.column)


_ALL_KEYWORDS = frozenset(
    {"tensor", "id", *_TERNARY, *_UNARY, *_BINARY_OBJ, *_BINARY_CELL}
)


def _head(expr: SList) -> str:
    if not expr.items or not isinstance(expr.items[0], Atom):
        raise TermParseError("expected a constructor name after '('", expr.line, expr.column)
    return expr.items[0].text


def _args(expr: SList, count: int) -> tuple[SExpr, ...]:
    args = expr.items[1:]
    if len(args) != count:
        raise TermParseError(
            f"{_head(expr)} takes {count} argument(s), got {len(args)}", expr.line, expr.column
        )
    return args


def parse_obj(text: str) -> ObjExpr:
    return _obj_from(read_sexpr(text))


def parse_cell(text: str) -> CellExpr:
    """Parse a cell term such as ``(comp (braid b a) (braid a b))``.

    Raises:
        TermParseError: With the line and column of the offending token.
    """
    return _cell_from(read_sexpr(text))
