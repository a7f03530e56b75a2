"""Core data model: constraints, constraint multisets, problem instances.

A ``ConstraintSet`` is an ordered multiset of typed constraints.  Multiplicities
are expanded into the index space ``[0, n)`` so that uniform sampling and
far-fraction counting are weighted correctly; objective values themselves are
multiplicity-invariant.

All types are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .errors import BadSpecError

#: Absolute tolerance for geometric predicates on normalized ([-1, 1]^d-ish)
#: coordinates.  Certificate-membership tests and threshold comparisons use it.
TOL = 1e-9

#: Implicit bounding box half-width for LP-backed solvers on normalized data.
BOX_BOUND = 1e6


@dataclass(frozen=True)
class Point:
    coords: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class Ball:
    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise BadSpecError(f"ball radius must be nonnegative, got {self.radius}")

    @property
    def dim(self) -> int:
        return len(self.center)


@dataclass(frozen=True)
class HalfSpace:
    """Linear constraint ``normal . x <= offset`` (sense 'le') or ``>=`` ('ge')."""

    normal: tuple[float, ...]
    offset: float
    sense: str = "le"

    def __post_init__(self):
        if self.sense not in ("le", "ge"):
            raise BadSpecError(f"sense must be 'le' or 'ge', got {self.sense!r}")
        if not any(a != 0.0 for a in self.normal):
            raise BadSpecError("half-space normal must have a nonzero entry")

    @property
    def dim(self) -> int:
        return len(self.normal)

    def as_le(self) -> tuple[tuple[float, ...], float]:
        """Return (a, b) with the constraint written as ``a . x <= b``."""
        if self.sense == "le":
            return self.normal, self.offset
        return tuple(-a for a in self.normal), -self.offset

    def satisfied_by(self, x: Sequence[float], tol: float = TOL) -> bool:
        a, b = self.as_le()
        scale = max(1.0, max(abs(v) for v in a))
        return sum(ai * xi for ai, xi in zip(a, x)) <= b + tol * scale


@dataclass(frozen=True)
class LabeledPoint:
    coords: tuple[float, ...]
    label: int

    @property
    def dim(self) -> int:
        return len(self.coords)


Constraint = Union[Point, Ball, HalfSpace, LabeledPoint]


class Kind(enum.Enum):
    MEB = "meb"
    INTERSECTING_BALL = "intersecting-ball"
    ANNULUS = "annulus"
    LINEAR_FEASIBILITY = "linear-feasibility"
    SEPARABILITY = "separability"


_KIND_ITEM_TYPE = {
    Kind.MEB: Point,
    Kind.INTERSECTING_BALL: Ball,
    Kind.ANNULUS: Point,
    Kind.LINEAR_FEASIBILITY: HalfSpace,
    Kind.SEPARABILITY: LabeledPoint,
}


def standard_delta(kind: Kind, dim: int) -> int:
    """Combinatorial dimension of each problem kind in ambient dimension ``dim``.

    Smallest enclosing ball and smallest intersecting ball (over ball bodies)
    have dimension d+1, the smallest annulus d+2, and feasibility of linear
    constraints d.  Separability reduces to linear feasibility with a bias
    coordinate, hence d+1.
    """
    if kind in (Kind.MEB, Kind.INTERSECTING_BALL):
        return dim + 1
    if kind is Kind.ANNULUS:
        return dim + 2
    if kind is Kind.LINEAR_FEASIBILITY:
        return dim
    if kind is Kind.SEPARABILITY:
        return dim + 1
    raise ValueError(kind)


@dataclass(frozen=True)
class ConstraintSet:
    """Ordered, duplicate-preserving multiset of constraints.

    ``items[i]`` occurs ``multiplicities[i]`` times; the expanded index space
    is ``[0, n)`` with ``n = sum(multiplicities)``.
    """

    items: tuple[Constraint, ...]
    multiplicities: tuple[int, ...]
    dim: int
    _cum: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.items) != len(self.multiplicities):
            raise BadSpecError("items and multiplicities must align")
        if self.dim < 1:
            raise BadSpecError("ambient dimension must be >= 1")
        for it in self.items:
            if it.dim != self.dim:
                raise BadSpecError(
                    f"item dimension {it.dim} != ambient dimension {self.dim}"
                )
        for m in self.multiplicities:
            if m < 1:
                raise BadSpecError("multiplicities must be >= 1")
        cum = []
        total = 0
        for m in self.multiplicities:
            total += m
            cum.append(total)
        object.__setattr__(self, "_cum", tuple(cum))

    @classmethod
    def of(cls, items: Iterable[Constraint], multiplicities=None, dim=None):
        items = tuple(items)
        if not items:
            raise BadSpecError("constraint set needs at least one item")
        if multiplicities is None:
            multiplicities = tuple(1 for _ in items)
        if dim is None:
            dim = items[0].dim
        return cls(items, tuple(multiplicities), dim)

    @property
    def n(self) -> int:
        """Total multiset size."""
        return self._cum[-1]

    def item_index(self, expanded: int) -> int:
        """Map an expanded index in [0, n) to its item index."""
        if not 0 <= expanded < self.n:
            raise IndexError(expanded)
        return bisect.bisect_right(self._cum, expanded)

    def item_at(self, expanded: int) -> Constraint:
        return self.items[self.item_index(expanded)]

    def first_expanded_index(self, item_idx: int) -> int:
        return self._cum[item_idx] - self.multiplicities[item_idx]

    def distinct(self, expanded_indices: Iterable[int]) -> list[int]:
        """Sorted distinct item indices behind a set of expanded indices."""
        seen = sorted({self.item_index(i) for i in expanded_indices})
        return seen


@dataclass(frozen=True)
class SubsetView:
    """A subset R of the expanded index space of a ConstraintSet."""

    parent: ConstraintSet
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = self.indices
        if len(set(idx)) != len(idx):
            raise BadSpecError("subset indices must be unique")
        if any(i < 0 or i >= self.parent.n for i in idx):
            raise BadSpecError("subset index out of range")
        if tuple(sorted(idx)) != idx:
            object.__setattr__(self, "indices", tuple(sorted(idx)))

    def __len__(self) -> int:
        return len(self.indices)

    def items(self) -> list[Constraint]:
        return [self.parent.item_at(i) for i in self.indices]

    def distinct_items(self) -> list[Constraint]:
        return [self.parent.items[j] for j in self.parent.distinct(self.indices)]

    def complement(self) -> tuple[int, ...]:
        inside = set(self.indices)
        return tuple(i for i in range(self.parent.n) if i not in inside)


@dataclass(frozen=True)
class ProblemInstance:
    """A constraint multiset bound to a problem kind.

    ``delta`` defaults to the kind's standard combinatorial dimension; it can
    be overridden for experiments probing alternative dimension bounds.
    ``k`` is the tested threshold; it is absent (None) for feasibility-style
    kinds.
    """

    constraints: ConstraintSet
    kind: Kind
    delta: int
    k: float | None = None

    def __post_init__(self):
        want = _KIND_ITEM_TYPE[self.kind]
        for it in self.constraints.items:
            if not isinstance(it, want):
                raise BadSpecError(
                    f"{self.kind.value} instances need {want.__name__} items, "
                    f"got {type(it).__name__}"
                )
        if self.delta < 1:
            raise BadSpecError("delta must be >= 1")

    @classmethod
    def make(cls, constraints: ConstraintSet, kind: Kind, k: float | None = None,
             delta: int | None = None) -> "ProblemInstance":
        if delta is None:
            delta = standard_delta(kind, constraints.dim)
        return cls(constraints, kind, delta, k)

    @property
    def n(self) -> int:
        return self.constraints.n

    @property
    def dim(self) -> int:
        return self.constraints.dim

    def subset(self, indices: Iterable[int]) -> SubsetView:
        return SubsetView(self.constraints, tuple(sorted(indices)))

    def full_subset(self) -> SubsetView:
        return SubsetView(self.constraints, tuple(range(self.n)))


# --------------------------------------------------------------------------
# Solver certificates and objective values
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BallCertificate:
    """A ball plus the support indices that determine it."""

    center: tuple[float, ...]
    radius: float
    support: tuple[int, ...] = ()

    def contains_point(self, p: Sequence[float], tol: float = TOL) -> bool:
        return math.dist(self.center, p) <= self.radius + tol

    def meets_ball(self, center: Sequence[float], radius: float,
                   tol: float = TOL) -> bool:
        return math.dist(self.center, center) <= self.radius + radius + tol


@dataclass(frozen=True)
class AnnulusCertificate:
    """Annulus (shared center, inner/outer radii) with its support indices.

    ``lift_a``/``lift_b`` are the values of the squared-radii LP variables:
    ``a = r_outer^2 - |c|^2`` and ``b = r_inner^2 - |c|^2``.  Containment
    tests use the linear residuals ``|p|^2 - 2 p.c`` against [b, a], which is
    exactly the LP feasibility test and numerically stabler than comparing
    distances for far-away centers.
    """

    center: tuple[float, ...]
    r_inner: float
    r_outer: float
    lift_a: float
    lift_b: float
    support: tuple[int, ...] = ()

    def contains_point(self, p: Sequence[float], tol: float = TOL) -> bool:
        g = sum(v * v for v in p) - 2.0 * sum(c * v for c, v in zip(self.center, p))
        scale = max(1.0, 2.0 * max(abs(v) for v in p))
        return self.lift_b - tol * scale <= g <= self.lift_a + tol * scale

    @property
    def squared_width(self) -> float:
        return self.lift_a - self.lift_b


@dataclass(frozen=True)
class LPCertificate:
    """Optimal point of a (lexicographically tie-broken) max-x1 LP."""

    point: tuple[float, ...]
    objective: float
    basis: tuple[int, ...] = ()
    on_box: bool = False

    def satisfies(self, hs: HalfSpace, tol: float = TOL) -> bool:
        return hs.satisfied_by(self.point, tol)


Solution = Union[BallCertificate, AnnulusCertificate, LPCertificate, None]


@dataclass(frozen=True)
class PhiValue:
    """Objective value of a subset, with sentinels and a tie-break vector.

    ``value`` is totally ordered with -inf for the empty set and +inf for
    infeasible LP subsets.  For LP-backed kinds ``tie`` carries the full
    optimal vertex so that equality of PhiValues means equality of the
    (unique, lexicographically tie-broken) optimum rather than only of the
    scalar objective; degenerate instances would otherwise break locality.
    """

    value: float
    tie: tuple[float, ...] = ()
    certificate: Solution = None

    @property
    def is_infeasible(self) -> bool:
        return math.isinf(self.value) and self.value > 0

    @property
    def is_empty(self) -> bool:
        return math.isinf(self.value) and self.value < 0

    def close_to(self, other: "PhiValue", tol: float = TOL) -> bool:
        if math.isinf(self.value) or math.isinf(other.value):
            return self.value == other.value
        if abs(self.value - other.value) > tol:
            return False
        if len(self.tie) != len(other.tie):
            return False
        return all(abs(a - b) <= tol for a, b in zip(self.tie, other.tie))

    def leq(self, other: "PhiValue", tol: float = TOL) -> bool:
        """Monotonicity comparison: self <= other up to tolerance."""
        if math.isinf(self.value) or math.isinf(other.value):
            return self.value <= other.value
        return self.value <= other.value + tol


PHI_EMPTY = PhiValue(float("-inf"))
PHI_INFEASIBLE = PhiValue(float("inf"))
