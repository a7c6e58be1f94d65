"""Little cubes configurations and numeric checks of explicit paths and homotopies.

A little n-cube is an affine embedding of the unit cube given by its
intervals ``(x_i, y_i)``; a configuration is an ordered tuple of cubes.
Operad composition substitutes configurations into the cubes of an outer
configuration and uses exact ``Fraction`` arithmetic when the inputs are
exact.

The named paths are the braiding path ``R`` between two cubes, the
syllepsis nullhomotopy ``v``, its mate ``vhat`` and the homotopies used to
compare the two sides of the syllepsis axiom for three cubes ``a, b, c``.
They are evaluated on cube centers with numpy, vectorized over a parameter
grid, and every cube of a path has the same side length.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Mapping, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

Number = Union[Fraction, float]

DEFAULT_SIDE = Fraction(1, 20)
DEFAULT_GRID = 64
DEFAULT_TOL = 1e-9

# side length of the two cubes of the point m
M_SIDE = Fraction(1, 5)


class CubeError(Exception):
    """Error in a little cubes computation."""

    pass


class CubeValidationError(CubeError, ValueError):
    """A cube interval is empty or leaves the unit interval."""

    pass


class OperadArityError(CubeError):
    """Dimensions or arities do not match for operad composition."""

    pass


class DisjointnessError(CubeError):
    """A composed configuration has overlapping cubes."""

    pass


class ParameterDomainError(CubeError, ValueError):
    """A path parameter is missing, unknown or outside its domain."""

    pass


# ---------------------------------------------------------------------------
# Cubes and configurations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LittleCube:
    """The affine embedding ``t_i ↦ (y_i - x_i) t_i + x_i`` on every axis."""

    intervals: tuple[tuple[Number, Number], ...]

    def __post_init__(self) -> None:
        intervals = tuple((lo, hi) for lo, hi in self.intervals)
        if not intervals:
            raise CubeValidationError("a little cube needs at least one axis")
        for axis, (lo, hi) in enumerate(intervals):
            if not 0 <= lo < hi <= 1:
                raise CubeValidationError(
                    f"axis {axis}: interval ({lo}, {hi}) must satisfy 0 <= x < y <= 1"
                )
        object.__setattr__(self, "intervals", intervals)

    @classmethod
    def unit(cls, dim: int) -> LittleCube:
        return cls(tuple((Fraction(0), Fraction(1)) for _ in range(dim)))

    @classmethod
    def centered(cls, center: Sequence[Number], side: Number) -> LittleCube:
        half = side / 2
        return cls(tuple((c - half, c + half) for c in center))

    @property
    def dim(self) -> int:
        return len(self.intervals)

    @property
    def center(self) -> tuple[Number, ...]:
        return tuple((lo + hi) / 2 for lo, hi in self.intervals)

    def apply(self, point: Sequence[Number]) -> tuple[Number, ...]:
        return tuple((hi - lo) * p + lo for (lo, hi), p in zip(self.intervals, point))

    def compose(self, inner: LittleCube) -> LittleCube:
        """The cube ``self ∘ inner``: ``inner`` placed inside ``self``."""
        if inner.dim != self.dim:
            raise OperadArityError(f"cannot place a {inner.dim}-cube inside a {self.dim}-cube")
        return LittleCube(
            tuple(
                (lo + (hi - lo) * a, lo + (hi - lo) * b)
                for (lo, hi), (a, b) in zip(self.intervals, inner.intervals)
            )
        )

    def disjoint_from(self, other: LittleCube) -> bool:
        """Open cubes are disjoint iff some axis has disjoint open intervals."""
        return any(
            hi <= lo2 or hi2 <= lo
            for (lo, hi), (lo2, hi2) in zip(self.intervals, other.intervals)
        )

    def to_dict(self) -> dict[str, Any]:
        return {"intervals": [[str(lo), str(hi)] for lo, hi in self.intervals]}


@dataclass(frozen=True)
class CubeConfig:
    """An ordered tuple of little cubes of one dimension."""

    dim: int
    cubes: tuple[LittleCube, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        cubes = tuple(self.cubes)
        for k, cube in enumerate(cubes):
            if cube.dim != self.dim:
                raise CubeValidationError(f"cube {k} has dimension {cube.dim}, expected {self.dim}")
        object.__setattr__(self, "cubes", cubes)

    @classmethod
    def identity(cls, dim: int) -> CubeConfig:
        return cls(dim, (LittleCube.unit(dim),))

    @property
    def arity(self) -> int:
        return len(self.cubes)

    def centers(self) -> tuple[tuple[Number, ...], ...]:
        return tuple(cube.center for cube in self.cubes)

    def to_dict(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "centers": [[str(c) for c in center] for center in self.centers()],
            "cubes": [cube.to_dict() for cube in self.cubes],
        }


def check_disjoint(config: CubeConfig) -> bool:
    """True iff the open cubes of ``config`` are pairwise disjoint."""
    cubes = config.cubes
    return all(
        cubes[i].disjoint_from(cubes[j])
        for i in range(len(cubes))
        for j in range(i + 1, len(cubes))
    )


def compose_operad(outer: CubeConfig, inners: Sequence[CubeConfig]) -> CubeConfig:
    """Substitute ``inners[k]`` into the k-th cube of ``outer``.

    Raises:
        OperadArityError: On a dimension or arity mismatch.
        DisjointnessError: If the result has overlapping cubes.
    """
    if len(inners) != outer.arity:
        raise OperadArityError(f"outer configuration has arity {outer.arity}, got {len(inners)} inputs")
    cubes: list[LittleCube] = []
    for k, (cube, inner) in enumerate(zip(outer.cubes, inners)):
        if inner.dim != outer.dim:
            raise OperadArityError(f"input {k} has dimension {inner.dim}, expected {outer.dim}")
        cubes.extend(cube.compose(c) for c in inner.cubes)
    result = CubeConfig(outer.dim, tuple(cubes))
    if not check_disjoint(result):
        raise DisjointnessError("composed configuration has overlapping cubes")
    return result


# ---------------------------------------------------------------------------
# Path formulas on cube centers
#
# Every formula maps parameter arrays (broadcast against each other) to an
# array of shape (..., arity, dim).
# ---------------------------------------------------------------------------

HALF = 0.5
PI = np.pi

# the two cubes of m, in three dimensions
_M3 = np.array([[0.3, 0.5, 0.5], [0.7, 0.5, 0.5]])
_LEFT, _RIGHT = _M3[0], _M3[1]
_M3_SIDE = float(M_SIDE)

# cube centers of a, b, c for the bracketings at the ends of the three-cube paths
_AB_C = (0.26, 0.34, 0.70)
_BA_C = (0.34, 0.26, 0.70)
_B_AC = (0.66, 0.30, 0.74)
_A_BC = (0.30, 0.66, 0.74)
_BC_A = (0.70, 0.26, 0.34)
_B_CA = (0.74, 0.30, 0.66)


def _cubes(*cubes: Sequence[Any]) -> np.ndarray:
    """Stack per-cube coordinate arrays into shape (..., arity, dim)."""
    dim = len(cubes[0])
    coords = np.broadcast_arrays(*(np.asarray(c, dtype=float) for cube in cubes for c in cube))
    stacked = np.stack(coords, axis=-1)
    return stacked.reshape(stacked.shape[:-1] + (len(cubes), dim))


def _nest(outer_center: np.ndarray, outer_side: float, inner: np.ndarray) -> np.ndarray:
    """Centers of ``inner`` after substitution into a cube of the given center and side."""
    return outer_center[..., None, :] + outer_side * (inner - HALF)


def _on_line(xs: Sequence[float], like: np.ndarray) -> np.ndarray:
    """Cubes at the given first coordinates, centered in the other two."""
    return _cubes(*((x + 0 * like, HALF, HALF) for x in xs))


def _slide(start: Sequence[float], end: Sequence[float]) -> Callable[[np.ndarray], np.ndarray]:
    """Straight-line motion along the first axis between two bracketings."""

    def path(lam: np.ndarray) -> np.ndarray:
        return _cubes(*((a + (b - a) * lam, HALF, HALF) for a, b in zip(start, end)))

    return path


def _ra_rb(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return _cubes(
        (HALF + np.cos(PI + PI * t) / 5, HALF + np.sin(PI + PI * t) / 5, HALF),
        (HALF + np.cos(PI * t) / 5, HALF + np.sin(PI * t) / 5, HALF),
    )


def _rdot(t: np.ndarray) -> np.ndarray:
    # R run backwards with the cube labels exchanged
    return _ra_rb(1 - np.asarray(t, dtype=float))[..., ::-1, :]


def _vhat(t: np.ndarray, s: np.ndarray) -> np.ndarray:
    t, s = np.asarray(t, dtype=float), np.asarray(s, dtype=float)
    lift = np.sin(PI * s) / 4
    return _cubes(
        (HALF + np.cos(PI + PI * t) / 5, HALF + (1 - 2 * s) * np.sin(PI + PI * t) / 5, HALF + lift),
        (HALF + np.cos(PI * t) / 5, HALF + (1 - 2 * s) * np.sin(PI * t) / 5, HALF - lift),
    )


def _v1_v2(r: np.ndarray, t: np.ndarray) -> np.ndarray:
    r, t = np.asarray(r, dtype=float), np.asarray(t, dtype=float)
    height = np.sqrt(np.clip(1 - r**2, 0, None)) / 5
    return _cubes(
        (
            HALF + r / 5 * np.cos(PI + 2 * PI * t),
            HALF + r / 5 * np.sin(PI + 2 * PI * t),
            HALF + height,
            HALF,
        ),
        (
            HALF + r / 5 * np.cos(2 * PI * t),
            HALF + r / 5 * np.sin(2 * PI * t),
            HALF - height,
            HALF,
        ),
    )


def _loop(t: np.ndarray) -> np.ndarray:
    """R followed by R with the cubes exchanged, over t in [0, 1], in four dimensions."""
    t = np.asarray(t, dtype=float)
    first = _ra_rb(np.clip(2 * t, 0, 1))
    second = _ra_rb(np.clip(2 * t - 1, 0, 1))[..., ::-1, :]
    plane = np.where(t[..., None, None] <= HALF, first, second)
    return np.concatenate([plane, np.full(plane.shape[:-1] + (1,), HALF)], axis=-1)


def _arc(t: np.ndarray, sign: float, lift: np.ndarray | float = 0.0) -> np.ndarray:
    """The shared shape of delta, gamma and H.

    ``sign`` scales the second coordinate (+1 for gamma, -1 for delta) and
    ``lift`` moves a up and b, c down in the third coordinate.
    """
    t = np.asarray(t, dtype=float)
    angle = PI / 3 * t
    return _cubes(
        (HALF + 6 / 25 * np.cos(PI + angle), HALF + sign * 6 / 25 * np.sin(PI + angle), HALF + lift),
        (8 / 25 + np.cos(angle) / 50, HALF + sign * np.sin(angle) / 50, HALF - lift),
        (17 / 25 + np.cos(angle) / 50, HALF + sign * np.sin(angle) / 50, HALF - lift),
    )


def _delta(t: np.ndarray) -> np.ndarray:
    return _arc(t, -1.0)


def _gamma(t: np.ndarray) -> np.ndarray:
    return _arc(t, 1.0)


def _h(t: np.ndarray, s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return _arc(t, 3 - 2 * s, np.sin(PI * (s - 1)) / 4)


def _three_stage(
    t: np.ndarray,
    first: Callable[[np.ndarray], np.ndarray],
    middle: Callable[[np.ndarray], np.ndarray],
    last: Callable[[np.ndarray], np.ndarray],
) -> np.ndarray:
    """Concatenate three paths on [0, 1] into one path on [0, 3]."""
    t = np.asarray(t, dtype=float)
    one = first(np.clip(t, 0, 1))
    two = middle(np.clip(t - 1, 0, 1))
    three = last(np.clip(t - 2, 0, 1))
    where = t[..., None, None]
    return np.where(where <= 1, one, np.where(where <= 2, two, three))


def _braid_then_assoc_then_braid(two_cube_path: Callable[[np.ndarray], np.ndarray]):
    """``(P ⊗ 1) · a · (1 ⊗ P)`` for a two-cube path P."""

    def first(tau: np.ndarray) -> np.ndarray:
        ab = _nest(_LEFT, _M3_SIDE, two_cube_path(tau))
        c = np.broadcast_to(_RIGHT, ab.shape[:-2] + (1, 3))
        return np.concatenate([ab, c], axis=-2)

    def last(tau: np.ndarray) -> np.ndarray:
        ac = _nest(_RIGHT, _M3_SIDE, two_cube_path(tau))
        b = np.broadcast_to(_LEFT, ac.shape[:-2] + (1, 3))
        return np.concatenate([ac[..., :1, :], b, ac[..., 1:, :]], axis=-2)

    return lambda t: _three_stage(t, first, _slide(_BA_C, _B_AC), last)


def _assoc_then_braid_then_assoc(two_cube_path: Callable[[np.ndarray], np.ndarray]):
    """``a · P_{a, bc} · a`` for a two-cube path P moving a past the block bc."""

    def middle(tau: np.ndarray) -> np.ndarray:
        outer = two_cube_path(tau)
        bc = _nest(outer[..., 1, :], _M3_SIDE, _M3)
        return np.concatenate([outer[..., :1, :], bc], axis=-2)

    return lambda t: _three_stage(t, _slide(_AB_C, _A_BC), middle, _slide(_BC_A, _B_CA))


_r1ar1 = _braid_then_assoc_then_braid(_ra_rb)
_rdot1ardot1 = _braid_then_assoc_then_braid(_rdot)
_ara = _assoc_then_braid_then_assoc(_ra_rb)
_ardota = _assoc_then_braid_then_assoc(_rdot)


def _blend(start: np.ndarray, end: np.ndarray, lam: np.ndarray) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)[..., None, None]
    return (1 - lam) * start + lam * end


def _l(t: np.ndarray, s: np.ndarray) -> np.ndarray:
    return _blend(_rdot1ardot1(t), _delta(t), np.asarray(s, dtype=float) - 1)


def _b(t: np.ndarray, s: np.ndarray) -> np.ndarray:
    return _blend(_delta(t), _ardota(t), np.asarray(s, dtype=float) - 2)


def _t(t: np.ndarray, s: np.ndarray) -> np.ndarray:
    return _blend(_r1ar1(t), _gamma(t), s)


def _m(t: np.ndarray, s: np.ndarray) -> np.ndarray:
    return _blend(_gamma(t), _ara(t), np.asarray(s, dtype=float) - 1)


def _mirror(centers: np.ndarray) -> np.ndarray:
    """Reflect the second coordinate: y ↦ 1 - y."""
    out = np.array(centers, dtype=float, copy=True)
    out[..., 1] = 1 - out[..., 1]
    return out


# plus for cube a, minus for b and c
_LIFT_SIGN = np.array([1.0, -1.0, -1.0])


def _restack(x: np.ndarray, y: np.ndarray, lift: np.ndarray) -> np.ndarray:
    """Build three-cube centers from per-cube x, y and a lift of the third coordinate."""
    z = HALF + _LIFT_SIGN * np.asarray(lift, dtype=float)[..., None]
    return np.stack(np.broadcast_arrays(x, y, z), axis=-1)


def _k(t: np.ndarray, s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    ell = _l(t, s / 2 + 1)
    sc = s[..., None]
    y = (1 - sc / 2) + (sc - 1) * ell[..., 1]
    return _restack(ell[..., 0], y, np.sin(PI * s / 2) / 4)


def _phi_lower(t: np.ndarray, s: np.ndarray, u: np.ndarray) -> np.ndarray:
    """The branch of Phi for 0 <= s <= 1."""
    s, u = np.asarray(s, dtype=float), np.asarray(u, dtype=float)
    ell = _l(t, s * u / 2 + 1)
    sc, uc = s[..., None], u[..., None]
    y = 1 - sc * (1 - uc / 2) + (sc * (2 - uc) - 1) * ell[..., 1]
    return _restack(ell[..., 0], y, np.sin(PI * s * (1 - u / 2)) / 4)


def _phi_upper(t: np.ndarray, s: np.ndarray, u: np.ndarray) -> np.ndarray:
    """The branch of Phi for 1 <= s <= 2."""
    s, u = np.asarray(s, dtype=float), np.asarray(u, dtype=float)
    ell = _l(t, s + (1 - s / 2) * u)
    sc, uc = s[..., None], u[..., None]
    y = (1 - sc / 2) * uc + ((sc - 2) * uc + 1) * ell[..., 1]
    return _restack(ell[..., 0], y, np.sin(PI * s * u / 2) / 4)


def _phi(t: np.ndarray, s: np.ndarray, u: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    lower = _phi_lower(t, s, u)
    upper = _phi_upper(t, s, u)
    return np.where(s[..., None, None] <= 1, lower, upper)


def _upper_left(t: np.ndarray, s: np.ndarray) -> np.ndarray:
    """The vhat row ``(vhat 1) a (1 vhat)`` stacked on top of L, over s in [0, 2]."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    top = _l(t, 1 + 0 * s)
    sc = s[..., None]
    row = _restack(top[..., 0], (1 - sc) * (1 - top[..., 1]) + sc * top[..., 1], np.sin(PI * s) / 4)
    return np.where(s[..., None, None] <= 1, row, _l(t, s))


# ---------------------------------------------------------------------------
# Named paths
# ---------------------------------------------------------------------------


class PathId(Enum):
    M = "m"
    RA_RB = "Ra_Rb"
    RDOT = "Rdot"
    VHAT = "vhat"
    V1_V2 = "v1_v2"
    DELTA = "delta"
    GAMMA = "gamma"
    R1AR1 = "R1aR1"
    RDOT1ARDOT1 = "Rdot1aRdot1"
    ARA = "aRa"
    ARDOTA = "aRdota"
    H = "H"
    L = "L"
    B = "B"
    T = "T"
    MHOM = "M"
    K = "K"
    PHI = "Phi"


Axis = tuple[str, float, float]


@dataclass(frozen=True)
class _Boundary:
    """A named identity between two center functions over a set of axes."""

    name: str
    axes: tuple[Axis, ...]
    actual: Callable[..., np.ndarray]
    expected: Callable[..., np.ndarray]


@dataclass(frozen=True)
class _PathSpec:
    dim: int
    arity: int
    domain: tuple[Axis, ...]
    centers: Callable[..., np.ndarray]
    # bound on the sup-norm jump between samples a grid step h apart
    modulus: Callable[[float], float]
    boundaries: tuple[_Boundary, ...] = ()


def _lipschitz(constant: float) -> Callable[[float], float]:
    return lambda h: constant * h


def _fixed(config: Sequence[float]) -> Callable[[np.ndarray], np.ndarray]:
    return lambda t: _on_line(config, np.asarray(t, dtype=float))


_T01: Axis = ("t", 0.0, 1.0)
_T03: Axis = ("t", 0.0, 3.0)


def _endpoints(path: Callable[[np.ndarray], np.ndarray]) -> tuple[_Boundary, ...]:
    ends = (("t", 0.0, 0.0),)
    return (
        _Boundary("t=0->(ab)c", ends, lambda t: path(t), _fixed(_AB_C)),
        _Boundary("t=3->b(ca)", ends, lambda t: path(t + 3), _fixed(_B_CA)),
    )


def _zero(x: np.ndarray) -> np.ndarray:
    return 0 * np.asarray(x, dtype=float)


_SPECS: dict[PathId, _PathSpec] = {
    PathId.RA_RB: _PathSpec(
        3,
        2,
        (_T01,),
        _ra_rb,
        _lipschitz(1.0),
        (
            _Boundary("t=0->m", (("t", 0.0, 0.0),), _ra_rb, lambda t: _M3 + _zero(t)[..., None, None]),
            _Boundary(
                "t=1->m_swapped",
                (("t", 1.0, 1.0),),
                _ra_rb,
                lambda t: _M3[::-1] + _zero(t)[..., None, None],
            ),
        ),
    ),
    PathId.RDOT: _PathSpec(
        3,
        2,
        (_T01,),
        _rdot,
        _lipschitz(1.0),
        (_Boundary("mirror->Ra_Rb", (_T01,), _rdot, lambda t: _mirror(_ra_rb(t))),),
    ),
    PathId.VHAT: _PathSpec(
        3,
        2,
        (_T01, ("s", 0.0, 1.0)),
        _vhat,
        _lipschitz(1.0),
        (
            _Boundary("s=0->Ra_Rb", (_T01,), lambda t: _vhat(t, _zero(t)), _ra_rb),
            _Boundary("s=1->Rdot", (_T01,), lambda t: _vhat(t, _zero(t) + 1), _rdot),
        ),
    ),
    PathId.V1_V2: _PathSpec(
        4,
        2,
        (("r", 0.0, 1.0), _T01),
        _v1_v2,
        # the third coordinate is only Hölder-1/2 in r at r = 1
        lambda h: 1.3 * h + np.sqrt(2 * h) / 5,
        (
            _Boundary("r=0->constant", (_T01,), lambda t: _v1_v2(_zero(t), t), lambda t: _v1_v2(_zero(t), _zero(t))),
            _Boundary("r=1->loop", (_T01,), lambda t: _v1_v2(_zero(t) + 1, t), _loop),
            _Boundary(
                "t=0->t=1",
                (("r", 0.0, 1.0),),
                lambda r: _v1_v2(r, _zero(r)),
                lambda r: _v1_v2(r, _zero(r) + 1),
            ),
        ),
    ),
    PathId.DELTA: _PathSpec(3, 3, (_T03,), _delta, _lipschitz(0.5), _endpoints(_delta)),
    PathId.GAMMA: _PathSpec(3, 3, (_T03,), _gamma, _lipschitz(0.5), _endpoints(_gamma)),
    PathId.R1AR1: _PathSpec(3, 3, (_T03,), _r1ar1, _lipschitz(1.0), _endpoints(_r1ar1)),
    PathId.RDOT1ARDOT1: _PathSpec(
        3, 3, (_T03,), _rdot1ardot1, _lipschitz(1.0), _endpoints(_rdot1ardot1)
    ),
    PathId.ARA: _PathSpec(3, 3, (_T03,), _ara, _lipschitz(1.0), _endpoints(_ara)),
    PathId.ARDOTA: _PathSpec(3, 3, (_T03,), _ardota, _lipschitz(1.0), _endpoints(_ardota)),
    PathId.H: _PathSpec(
        3,
        3,
        (_T03, ("s", 1.0, 2.0)),
        _h,
        _lipschitz(1.0),
        (
            _Boundary("s=1->gamma", (_T03,), lambda t: _h(t, _zero(t) + 1), _gamma),
            _Boundary("s=2->delta", (_T03,), lambda t: _h(t, _zero(t) + 2), _delta),
        ),
    ),
    PathId.L: _PathSpec(
        3,
        3,
        (_T03, ("s", 1.0, 2.0)),
        _l,
        _lipschitz(1.0),
        (
            _Boundary("s=1->Rdot1aRdot1", (_T03,), lambda t: _l(t, _zero(t) + 1), _rdot1ardot1),
            _Boundary("s=2->delta", (_T03,), lambda t: _l(t, _zero(t) + 2), _delta),
        ),
    ),
    PathId.B: _PathSpec(
        3,
        3,
        (_T03, ("s", 2.0, 3.0)),
        _b,
        _lipschitz(1.0),
        (
            _Boundary("s=2->delta", (_T03,), lambda t: _b(t, _zero(t) + 2), _delta),
            _Boundary("s=3->aRdota", (_T03,), lambda t: _b(t, _zero(t) + 3), _ardota),
        ),
    ),
    PathId.T: _PathSpec(
        3,
        3,
        (_T03, ("s", 0.0, 1.0)),
        _t,
        _lipschitz(1.0),
        (
            _Boundary("s=0->R1aR1", (_T03,), lambda t: _t(t, _zero(t)), _r1ar1),
            _Boundary("s=1->gamma", (_T03,), lambda t: _t(t, _zero(t) + 1), _gamma),
            _Boundary(
                "mirror->L",
                (_T03, ("s", 0.0, 1.0)),
                _t,
                lambda t, s: _mirror(_l(t, np.asarray(s) + 1)),
            ),
        ),
    ),
    PathId.MHOM: _PathSpec(
        3,
        3,
        (_T03, ("s", 1.0, 2.0)),
        _m,
        _lipschitz(1.0),
        (
            _Boundary("s=1->gamma", (_T03,), lambda t: _m(t, _zero(t) + 1), _gamma),
            _Boundary("s=2->aRa", (_T03,), lambda t: _m(t, _zero(t) + 2), _ara),
            _Boundary(
                "mirror->B",
                (_T03, ("s", 1.0, 2.0)),
                _m,
                lambda t, s: _mirror(_b(t, np.asarray(s) + 1)),
            ),
        ),
    ),
    PathId.K: _PathSpec(
        3,
        3,
        (_T03, ("s", 0.0, 2.0)),
        _k,
        _lipschitz(2.0),
        (
            _Boundary("s=0->R1aR1", (_T03,), lambda t: _k(t, _zero(t)), _r1ar1),
            _Boundary("s=2->delta", (_T03,), lambda t: _k(t, _zero(t) + 2), _delta),
        ),
    ),
    PathId.PHI: _PathSpec(
        3,
        3,
        (_T03, ("s", 0.0, 2.0), ("u", 0.0, 1.0)),
        _phi,
        _lipschitz(4.0),
        (
            _Boundary(
                "u=1->K",
                (_T03, ("s", 0.0, 2.0)),
                lambda t, s: _phi(t, s, _zero(s) + 1),
                _k,
            ),
            _Boundary(
                "u=0->upper_left",
                (_T03, ("s", 0.0, 2.0)),
                lambda t, s: _phi(t, s, _zero(s)),
                _upper_left,
            ),
            _Boundary(
                "s=1->case_agreement",
                (_T03, ("u", 0.0, 1.0)),
                lambda t, u: _phi_lower(t, _zero(u) + 1, u),
                lambda t, u: _phi_upper(t, _zero(u) + 1, u),
            ),
        ),
    ),
}


@dataclass(frozen=True)
class NamedPath:
    """A named path or homotopy of little cubes configurations.

    ``side`` is the side length of every cube; ``None`` selects 1/5 for
    the point ``m`` and ``DEFAULT_SIDE`` otherwise.
    """

    id: PathId
    side: Fraction | None = None

    @classmethod
    def named(cls, name: str | PathId, side: Number | None = None) -> NamedPath:
        try:
            path_id = name if isinstance(name, PathId) else PathId(name)
        except ValueError:
            known = ", ".join(p.value for p in PathId)
            raise ParameterDomainError(f"unknown path {name!r}; expected one of {known}") from None
        return cls(path_id, None if side is None else Fraction(side))

    @property
    def resolved_side(self) -> Fraction:
        if self.side is not None:
            return self.side
        return M_SIDE if self.id is PathId.M else DEFAULT_SIDE

    @property
    def dim(self) -> int:
        return 4 if self.id is PathId.M else _SPECS[self.id].dim

    @property
    def arity(self) -> int:
        return 2 if self.id is PathId.M else _SPECS[self.id].arity

    @property
    def domain(self) -> tuple[Axis, ...]:
        return () if self.id is PathId.M else _SPECS[self.id].domain


_M_CENTERS = (
    (Fraction(3, 10), Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)),
    (Fraction(7, 10), Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)),
)


def _check_params(path: NamedPath, params: Mapping[str, float]) -> dict[str, float]:
    names = [name for name, _, _ in path.domain]
    unknown = sorted(set(params) - set(names))
    if unknown:
        raise ParameterDomainError(f"{path.id.value} has no parameter(s) {', '.join(unknown)}")
    values: dict[str, float] = {}
    for name, lo, hi in path.domain:
        if name not in params:
            raise ParameterDomainError(f"{path.id.value} needs parameter {name}")
        value = float(params[name])
        if not lo <= value <= hi:
            raise ParameterDomainError(
                f"{path.id.value}: {name}={value} outside [{lo:g}, {hi:g}]"
            )
        values[name] = value
    return values


def eval_path(path: NamedPath, params: Mapping[str, float] | None = None) -> CubeConfig:
    """Evaluate a named path at one parameter point.

    Raises:
        ParameterDomainError: For missing, unknown or out-of-domain parameters.
        CubeValidationError: If a cube of the given side leaves the unit cube.
    """
    params = dict(params or {})
    if path.id is PathId.M:
        _check_params(path, params)
        side = path.resolved_side
        return CubeConfig(4, tuple(LittleCube.centered(c, side) for c in _M_CENTERS))
    values = _check_params(path, params)
    spec = _SPECS[path.id]
    centers = spec.centers(*(np.asarray(values[name]) for name, _, _ in spec.domain))
    side = float(path.resolved_side)
    return CubeConfig(
        spec.dim,
        tuple(LittleCube.centered([float(c) for c in center], side) for center in centers),
    )


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    """One check of a homotopy sweep; ``failures`` lists failing parameter points."""

    path: PathId
    check: str
    passed: bool
    failures: tuple[dict[str, float], ...] = ()
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "check": self.check,
            "passed": self.passed,
            "failures": [dict(f) for f in self.failures],
            "detail": self.detail,
        }


@dataclass(frozen=True)
class HomotopyReport:
    path: PathId
    grid: int
    side: Fraction
    tol: float
    min_sep: float
    results: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __bool__(self) -> bool:
        return self.passed

    def lines(self) -> list[str]:
        return homotopy_report_lines(self)

    def to_dict(self) -> dict[str, Any]:
        return {
            "path": self.path.value,
            "passed": self.passed,
            "grid": self.grid,
            "side": str(self.side),
            "tol": self.tol,
            "min_sep": self.min_sep,
            "checks": [r.to_dict() for r in self.results],
        }


def _format_params(point: Mapping[str, float]) -> str:
    return "[" + ",".join(f"{name}={value:.6g}" for name, value in point.items()) + "]"


def homotopy_report_lines(report: HomotopyReport) -> list[str]:
    """``PASS <path> <check> min_sep=<v>`` per passing check, one FAIL line per failing point."""
    lines: list[str] = []
    sep = f"min_sep={report.min_sep:.6f}"
    for result in report.results:
        if result.passed:
            lines.append(f"PASS {report.path.value} {result.check} {sep}")
        elif not result.failures:
            lines.append(f"FAIL {report.path.value} {result.check} {sep}")
        else:
            for point in result.failures:
                lines.append(
                    f"FAIL {report.path.value} {result.check} {_format_params(point)} {sep}"
                )
    return lines


def _grid(axes: Sequence[Axis], resolution: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Sample points per axis and the matching meshgrid (ij indexing)."""
    points = [
        np.array([lo]) if lo == hi else np.linspace(lo, hi, resolution) for _, lo, hi in axes
    ]
    return points, list(np.meshgrid(*points, indexing="ij"))


def _points(axes: Sequence[Axis], mesh: Sequence[np.ndarray], mask: np.ndarray) -> tuple[dict[str, float], ...]:
    indices = np.argwhere(mask)
    return tuple(
        {name: float(mesh[k][tuple(idx)]) for k, (name, _, _) in enumerate(axes)}
        for idx in indices
    )


def _separation(centers: np.ndarray) -> np.ndarray:
    """Per sample, the least sup-norm distance between two cube centers."""
    diff = np.abs(centers[..., :, None, :] - centers[..., None, :, :]).max(axis=-1)
    k = centers.shape[-2]
    rows, cols = np.triu_indices(k, 1)
    return diff[..., rows, cols].min(axis=-1)


def _verify_point_m(path: NamedPath) -> HomotopyReport:
    config = eval_path(path)
    side = path.resolved_side
    centers_ok = config.centers() == _M_CENTERS
    results = (
        CheckResult(path.id, "centers", centers_ok, detail="" if centers_ok else "centers moved"),
        CheckResult(path.id, "disjoint", check_disjoint(config)),
    )
    return HomotopyReport(path.id, 1, side, 0.0, float(_M_CENTERS[1][0] - _M_CENTERS[0][0]), results)


def verify_homotopy(
    path: NamedPath,
    grid_resolution: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
) -> HomotopyReport:
    """Sweep a named path over a uniform grid.

    Checks, in order: disjointness of the cubes at every sample, that every
    cube stays inside the unit cube, each boundary identity of the path
    within ``tol``, and a continuity proxy bounding the jump between
    neighbouring samples.
    """
    if grid_resolution < 2:
        raise ParameterDomainError(f"grid resolution must be >= 2, got {grid_resolution}")
    if path.id is PathId.M:
        return _verify_point_m(path)
    spec = _SPECS[path.id]
    side = float(path.resolved_side)
    points, mesh = _grid(spec.domain, grid_resolution)
    centers = spec.centers(*mesh)
    separation = _separation(centers)
    min_sep = float(separation.min())

    results = [
        CheckResult(
            path.id,
            "disjoint",
            bool((separation >= side).all()),
            _points(spec.domain, mesh, separation < side),
        )
    ]
    outside = ((centers - side / 2 < 0) | (centers + side / 2 > 1)).any(axis=(-1, -2))
    results.append(
        CheckResult(path.id, "inside", not outside.any(), _points(spec.domain, mesh, outside))
    )

    for boundary in spec.boundaries:
        _, bmesh = _grid(boundary.axes, grid_resolution)
        gap = np.abs(boundary.actual(*bmesh) - boundary.expected(*bmesh)).max(axis=(-1, -2))
        bad = gap > tol
        results.append(
            CheckResult(
                path.id,
                boundary.name,
                not bad.any(),
                _points(boundary.axes, bmesh, bad),
                f"max deviation {float(gap.max()):.3e}",
            )
        )

    jumps_ok = True
    worst = 0.0
    for axis, (name, lo, hi) in enumerate(spec.domain):
        step = (hi - lo) / (grid_resolution - 1)
        jump = float(np.abs(np.diff(centers, axis=axis)).max())
        worst = max(worst, jump)
        if jump > spec.modulus(step) + tol:
            jumps_ok = False
    results.append(
        CheckResult(path.id, "continuity", jumps_ok, detail=f"largest step {worst:.3e}")
    )

    logger.debug(
        "verify_homotopy %s: grid=%d side=%s min_sep=%.6f passed=%s",
        path.id.value,
        grid_resolution,
        path.resolved_side,
        min_sep,
        all(r.passed for r in results),
    )
    return HomotopyReport(
        path.id, grid_resolution, path.resolved_side, tol, min_sep, tuple(results)
    )
