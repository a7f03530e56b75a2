"""Lower-bound instance families and random fixtures, with exact certification.

The two adversarial families repeat a handful of distinct constraints with
carefully chosen multiplicities: a separable/coverable heavy point plus d (or
3d) rare groups.  Far-ness is certified exactly on the distinct support
(weighted maximum-feasible-subsystem for separability, weighted removal search
for enclosing balls), so testers can be driven at the certified fraction.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .constraints import (
    BOX_BOUND,
    Ball,
    ConstraintSet,
    HalfSpace,
    Kind,
    Point,
    ProblemInstance,
)
from .errors import BadSpecError, CertificationFailedError
from .geometry import min_enclosing_ball, scaled_basis_simplex, simplex_circumradius
from .linprog import exhaustive_max_feasible
from .seidel import lex_lp_solve
from .separability import LabeledPointSet, affine_lift, reduce_to_constraints


class Family(enum.Enum):
    MOMENT_NEAR = "moment-near"
    MOMENT_FAR = "moment-far"
    SIMPLEX_NEAR = "simplex-near"
    SIMPLEX_FAR = "simplex-far"
    RANDOM_FEASIBLE = "random-feasible"
    RANDOM_FAR = "random-far"

    @property
    def is_far(self) -> bool:
        return self in (Family.MOMENT_FAR, Family.SIMPLEX_FAR, Family.RANDOM_FAR)


@dataclass(frozen=True)
class FamilySpec:
    family: Family
    d: int
    n: int
    epsilon: float
    seed: int = 0
    k: float | None = None  # simplex families
    kind: Kind | None = None  # random families

    def __post_init__(self):
        if self.d < 1:
            raise BadSpecError("d must be >= 1")
        if not 0 < self.epsilon <= 1:
            raise BadSpecError("epsilon must be in (0, 1]")
        if self.n < 1:
            raise BadSpecError("n must be >= 1")


def family_multiplicities(spec: FamilySpec):
    """Heavy/light multiplicities after rounding correction.

    Non-integral light multiplicities are floored and the remainder goes to
    the heavy point; the achieved light-mass fraction is reported as
    epsilon_effective.
    """
    groups = spec.d if not spec.family.is_far else 3 * spec.d
    m_light = math.floor(spec.epsilon * spec.n / groups)
    heavy = spec.n - groups * m_light
    if m_light < 1:
        raise BadSpecError(
            f"epsilon*n/{groups} < 1: light groups would be empty")
    if heavy < 1:
        raise BadSpecError("heavy multiplicity would be empty")
    eps_eff = groups * m_light / spec.n
    return heavy, m_light, groups, eps_eff


# --------------------------------------------------------------------------
# Moment-curve separability families
# --------------------------------------------------------------------------


def moment_curve_parameters(d: int) -> list[Fraction]:
    return [Fraction(i, 3 * d + 1) for i in range(1, 3 * d + 2)]


def moment_curve_points(d: int) -> LabeledPointSet:
    """The 3d+1 alternately-labeled moment-curve points, multiplicity one.

    Point i sits at (t_i, t_i^2, ..., t_i^d) with t_i = i/(3d+1) and carries
    label (-1)^i; the parameter normalization into (0, 1] is a positive
    rescaling of the curve parameter and leaves the separability structure
    (and minimum relabel counts) unchanged.
    """
    pts = []
    labels = []
    for i, t in enumerate(moment_curve_parameters(d), start=1):
        pts.append(tuple(float(t ** j) for j in range(1, d + 1)))
        labels.append((-1) ** i)
    return LabeledPointSet.of(pts, labels)


def moment_curve_exact(d: int):
    """Exact-rational moment-curve coordinates with their labels."""
    out = []
    for i, t in enumerate(moment_curve_parameters(d), start=1):
        out.append((tuple(t ** j for j in range(1, d + 1)), (-1) ** i))
    return out


def build_separability_family(spec: FamilySpec) -> tuple[LabeledPointSet, dict]:
    """Near (separable) or far moment-curve family with exact multiplicities.

    Near: d+1 of the 3d+1 points, one heavy, d light.  Far: all 3d+1 points,
    one heavy, 3d light.  The heavy point and the near-family support are
    drawn from the seed.  Items are ordered heavy-first, then lights by curve
    index, so light groups are contiguous in the expanded index space.
    """
    if spec.family not in (Family.MOMENT_NEAR, Family.MOMENT_FAR):
        raise BadSpecError(f"not a moment-curve family: {spec.family}")
    heavy_mult, m_light, groups, eps_eff = family_multiplicities(spec)
    base = moment_curve_points(spec.d)
    rng = np.random.default_rng(spec.seed)
    total = 3 * spec.d + 1
    if spec.family is Family.MOMENT_NEAR:
        chosen = sorted(int(i) for i in rng.choice(total, size=spec.d + 1,
                                                   replace=False))
    else:
        chosen = list(range(total))
    heavy_pos = int(rng.integers(len(chosen)))
    order = [chosen[heavy_pos]] + [c for I, c in enumerate(chosen) if I != heavy_pos]
    mults = [heavy_mult] + [m_light] * groups
    pts = LabeledPointSet(
        tuple(base.points[i] for i in order),
        tuple(base.labels[i] for i in order),
        tuple(mults))
    info = {
        "family": spec.family.value,
        "epsilon_effective": eps_eff,
        "heavy_curve_index": order[0],
        "curve_indices": order,
        "heavy_multiplicity": heavy_mult,
        "light_multiplicity": m_light,
        "light_groups": groups,
    }
    return pts, info


def _exact_margin_rows(points, labels):
    """Exact affine margin system: rows (a, b) with a.x <= b, plus bias column."""
    rows = []
    for p, lab in zip(points, labels):
        lifted = (Fraction(1),) + tuple(Fraction(v) for v in p)
        if lab == 1:
            rows.append(tuple(-v for v in lifted) + (Fraction(-1),))
        else:
            rows.append(lifted + (Fraction(-1),))
    return [(r[:-1], r[-1]) for r in rows]


def exact_separable(points, labels) -> bool:
    """Exact-rational affine separability of labeled points (margin system)."""
    rows = _exact_margin_rows(points, labels)
    dim = len(rows[0][0])
    res = lex_lp_solve([[1] + [0] * (dim - 1)], rows, dim, exact=True)
    return res.feasible


def weighted_max_fs_exact(rows, weights):
    """Maximum-weight feasible subsystem by exact enumeration (small m only)."""
    m = len(rows)
    dim = len(rows[0][0])
    best_w = 0
    best_mask = 0
    for mask in range(1, 1 << m):
        w = sum(weights[i] for i in range(m) if mask >> i & 1)
        if w <= best_w:
            continue
        sub = [rows[i] for i in range(m) if mask >> i & 1]
        res = lex_lp_solve([[1] + [0] * (dim - 1)], sub, dim, exact=True)
        if res.feasible:
            best_w, best_mask = w, mask
    return best_w, tuple(i for i in range(m) if best_mask >> i & 1)


def certify_separability_family(pts: LabeledPointSet) -> dict:
    """Exact certification of a labeled multiset's distance from separable.

    Near sets certify separable; far sets certify the minimum removal count
    via exact weighted MAX-FS on the distinct affine margin rows.  Cheap
    regardless of n because the families have few distinct points.
    """
    exact_pts = [tuple(Fraction(c).limit_denominator(10**12) for c in p)
                 for p in pts.points]
    if exact_separable(exact_pts, pts.labels):
        return {"method": "exact-rational-lp", "separable": True,
                "far_removals": 0, "far_fraction": 0.0}
    rows = _exact_margin_rows(exact_pts, pts.labels)
    best_w, kept = weighted_max_fs_exact(rows, list(pts.multiplicities))
    removals = pts.n - best_w
    return {
        "method": "exact-weighted-max-fs",
        "separable": False,
        "max_feasible_weight": int(best_w),
        "far_removals": int(removals),
        "far_fraction": removals / pts.n,
        "kept_items": list(kept),
    }


# --------------------------------------------------------------------------
# Regular-simplex enclosing-ball families
# --------------------------------------------------------------------------


def simplex_side_for_threshold(d: int, k: float) -> float:
    """Side length making the (d+1)-vertex sub-simplex circumradius exactly k."""
    return k / simplex_circumradius(d)


def build_meb_family(spec: FamilySpec) -> tuple[ConstraintSet, float, dict]:
    """Enclosing-ball family on regular-simplex vertices in R^(3d+1).

    Near: d+1 vertices (their circumradius is exactly k).  Far: all 3d+1
    vertices; the full circumradius strictly exceeds k because the simplex
    circumradius grows with the number of vertices.
    """
    if spec.family not in (Family.SIMPLEX_NEAR, Family.SIMPLEX_FAR):
        raise BadSpecError(f"not a simplex family: {spec.family}")
    if spec.k is None or spec.k <= 0:
        raise BadSpecError("simplex families need a positive threshold k")
    heavy_mult, m_light, groups, eps_eff = family_multiplicities(spec)
    total = 3 * spec.d + 1
    side = simplex_side_for_threshold(spec.d, spec.k)
    vertices = scaled_basis_simplex(total, side)
    rng = np.random.default_rng(spec.seed)
    if spec.family is Family.SIMPLEX_NEAR:
        chosen = sorted(int(i) for i in rng.choice(total, size=spec.d + 1,
                                                   replace=False))
    else:
        chosen = list(range(total))
    heavy_pos = int(rng.integers(len(chosen)))
    order = [chosen[heavy_pos]] + [c for I, c in enumerate(chosen) if I != heavy_pos]
    items = tuple(Point(tuple(float(v) for v in vertices[i])) for i in order)
    mults = (heavy_mult,) + (m_light,) * groups
    cset = ConstraintSet(items, mults, total)
    full_radius = side * math.sqrt((len(chosen) - 1) / (2.0 * len(chosen)))
    info = {
        "family": spec.family.value,
        "epsilon_effective": eps_eff,
        "side": side,
        "heavy_vertex": order[0],
        "vertex_indices": order,
        "heavy_multiplicity": heavy_mult,
        "light_multiplicity": m_light,
        "light_groups": groups,
        "distinct_radius": full_radius,
    }
    return cset, spec.k, info


def certify_meb_family(spec: FamilySpec, info: dict) -> dict:
    """Closed-form removal certificate for simplex families.

    Any m-vertex subset is itself a regular simplex with circumradius
    ``side * sqrt((m-1)/(2m))``, monotone in m, so a subset fits in radius k
    exactly when it keeps at most d+1 distinct vertices.  The weighted removal
    minimum is therefore n - (heavy + d * light).
    """
    if spec.family is Family.SIMPLEX_NEAR:
        return {"method": "regular-simplex-closed-form", "far_removals": 0,
                "far_fraction": 0.0, "fits_radius": spec.k}
    heavy, m_light, groups, _ = family_multiplicities(spec)
    keep = heavy + spec.d * m_light
    removals = spec.n - keep
    return {
        "method": "regular-simplex-closed-form",
        "far_removals": int(removals),
        "far_fraction": removals / spec.n,
        "max_keepable_weight": int(keep),
        "distinct_radius": info["distinct_radius"],
    }


def exhaustive_meb_removals(points, weights, k, tol: float = 1e-9):
    """Exact minimum removal weight so the rest fits in a radius-k ball.

    Brute enumeration over distinct-point subsets; generic oracle used to
    validate the closed-form certificates at small d.
    """
    pts = np.asarray(points, dtype=float)
    m = len(pts)
    if m > 16:
        raise BadSpecError("removal oracle is exponential; need <= 16 distinct points")
    total = sum(weights)
    best_keep = 0
    for mask in range(1, 1 << m):
        w = sum(weights[i] for i in range(m) if mask >> i & 1)
        if w <= best_keep:
            continue
        sel = [i for i in range(m) if mask >> i & 1]
        if min_enclosing_ball(pts[sel]).radius <= k + tol:
            best_keep = w
    return total - best_keep


# --------------------------------------------------------------------------
# Group-discovery experiment (coupon-collector behavior of far families)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupDiscoveryResult:
    mean_queries: float
    expected_queries: float
    trials: int
    curve: tuple[int, ...]


def expected_group_discovery_queries(d: int, n: int, m_light: int) -> float:
    """Closed-form expected draws to see d+1 of the 3d light groups.

    Waiting times are geometric: sum over j of n / ((3d - j) * m_light) for
    j = 0..d, i.e. (n / m_light) * (H_{3d} - H_{2d-1}).
    """
    return (n / m_light) * sum(1.0 / j for j in range(2 * d, 3 * d + 1))


def empirical_group_discovery(spec: FamilySpec, trials: int,
                              seed: int = 0) -> GroupDiscoveryResult:
    """Simulate uniform constraint draws until d+1 distinct light groups appear.

    Exhibits the Theta(d/epsilon) scaling of the far families: an algorithm
    must see d+1 rare groups before the instance stops looking coverable.
    """
    if not spec.family.is_far:
        raise BadSpecError("group discovery is defined for far families")
    heavy, m_light, groups, _ = family_multiplicities(spec)
    need = spec.d + 1
    n = spec.n
    rng = np.random.default_rng(seed)
    curve = []
    for _ in range(trials):
        seen: set[int] = set()
        queries = 0
        while len(seen) < need:
            batch = rng.integers(0, n, size=64)
            for v in batch:
                queries += 1
                if v >= heavy:
                    seen.add(int((v - heavy) // m_light))
                    if len(seen) >= need:
                        break
        curve.append(queries)
    expected = expected_group_discovery_queries(spec.d, n, m_light)
    return GroupDiscoveryResult(float(np.mean(curve)), expected, trials,
                                tuple(curve))


# --------------------------------------------------------------------------
# Random fixtures
# --------------------------------------------------------------------------


def random_instance(kind: Kind, d: int, n: int, feasible: bool,
                    epsilon_target: float = 0.3, seed: int = 0,
                    k: float | None = None, certify: bool | None = None
                    ) -> tuple[ProblemInstance, dict]:
    """Random feasible or certified-far fixture of the requested kind.

    Feasible fixtures share a planted witness; far fixtures plant a batch of
    constraints violating every witness region, with the exact far fraction
    certified by brute force at small n (certification is mandatory below
    n = 20 unless disabled).
    """
    rng = np.random.default_rng(seed)
    m_far = max(1, math.ceil(epsilon_target * n)) if not feasible else 0
    if certify is None:
        certify = not feasible and n <= 20

    if kind is Kind.MEB:
        k = 1.0 if k is None else k
        pts = []
        for _ in range(n - m_far):
            v = rng.normal(size=d)
            v *= (0.5 * k * rng.random() ** (1 / d)) / np.linalg.norm(v)
            pts.append(Point(tuple(float(x) for x in v)))
        for _ in range(m_far):
            v = rng.normal(size=d)
            v *= (10.0 * k) / np.linalg.norm(v)
            pts.append(Point(tuple(float(x) for x in v)))
        cset = ConstraintSet.of(pts)
        inst = ProblemInstance.make(cset, Kind.MEB, k=k)
        info = {"planted_far": m_far}
        if certify:
            removals = exhaustive_meb_removals(
                [p.coords for p in pts], [1] * n, k)
            info["far_removals"] = int(removals)
            info["far_fraction"] = removals / n
            if removals / n < epsilon_target:
                raise CertificationFailedError(
                    f"target far fraction {epsilon_target} not certified: "
                    f"only {removals}/{n} removals needed")
        return inst, info

    if kind is Kind.INTERSECTING_BALL:
        k = 1.0 if k is None else k
        witness = rng.uniform(-0.2, 0.2, size=d)
        balls = []
        for _ in range(n - m_far):
            rho = float(rng.uniform(0.2, 0.6))
            v = rng.normal(size=d)
            v = witness + v * (0.9 * rho * rng.random()) / np.linalg.norm(v)
            balls.append(Ball(tuple(float(x) for x in v), rho))
        for _ in range(m_far):
            v = rng.normal(size=d)
            v *= 10.0 / np.linalg.norm(v)
            balls.append(Ball(tuple(float(x) for x in v), 0.2))
        cset = ConstraintSet.of(balls)
        inst = ProblemInstance.make(cset, Kind.INTERSECTING_BALL, k=k)
        return inst, {"planted_far": m_far}

    if kind is Kind.ANNULUS:
        rho, jitter = 0.5, 0.02
        k = 5 * rho * jitter if k is None else k
        pts = []
        for _ in range(n - m_far):
            v = rng.normal(size=d)
            v *= float(rng.uniform(rho - jitter, rho + jitter)) / np.linalg.norm(v)
            pts.append(Point(tuple(float(x) for x in v)))
        for _ in range(m_far):
            v = rng.normal(size=d)
            v *= 3.0 * rho / np.linalg.norm(v)
            pts.append(Point(tuple(float(x) for x in v)))
        cset = ConstraintSet.of(pts)
        inst = ProblemInstance.make(cset, Kind.ANNULUS, k=k)
        return inst, {"planted_far": m_far}

    if kind is Kind.LINEAR_FEASIBILITY:
        witness = rng.uniform(-0.5, 0.5, size=d)
        cons = []
        for _ in range(n - m_far):
            a = _nonzero_int_vector(rng, d, 5)
            slack = float(rng.uniform(0.1, 2.0))
            if rng.random() < 0.5:
                cons.append(HalfSpace(a, float(np.dot(a, witness)) + slack, "le"))
            else:
                cons.append(HalfSpace(a, float(np.dot(a, witness)) - slack, "ge"))
        for _ in range(m_far):
            a = _nonzero_int_vector(rng, d, 5)
            # unsatisfiable inside the solver box: every witness region dies
            cons.append(HalfSpace(a, 2.0 * BOX_BOUND * float(np.linalg.norm(a)), "ge"))
        cset = ConstraintSet.of(cons)
        inst = ProblemInstance.make(cset, Kind.LINEAR_FEASIBILITY)
        info = {"planted_far": m_far}
        if certify:
            best_w, _ = exhaustive_max_feasible(list(cons))
            removals = n - int(best_w)
            info["far_removals"] = removals
            info["far_fraction"] = removals / n
            if removals / n < epsilon_target:
                raise CertificationFailedError(
                    f"target far fraction {epsilon_target} not certified: "
                    f"only {removals}/{n} removals needed")
        return inst, info

    raise BadSpecError(f"random fixtures not defined for kind {kind}")


def _nonzero_int_vector(rng, d, bound):
    while True:
        a = tuple(float(v) for v in rng.integers(-bound, bound + 1, size=d))
        if any(v != 0 for v in a):
            return a


def random_axiom_instance(kind: Kind, d: int, n: int, seed: int = 0
                          ) -> ProblemInstance:
    """Small general-position fixture on an integer grid, for exact checks.

    Coordinates are grid-snapped (scaled integers) so that tolerance never
    flips a predicate decision; duplicates, and for the annulus kind rank
    deficiency, are resampled away.
    """
    rng = np.random.default_rng(seed)
    if kind in (Kind.MEB, Kind.ANNULUS):
        while True:
            raw = rng.integers(-9, 10, size=(n, d))
            pts = {tuple(float(v) / 10.0 for v in row) for row in raw}
            if len(pts) < n:
                continue
            arr = np.array(sorted(pts))
            if kind is Kind.ANNULUS and np.linalg.matrix_rank(
                    arr - arr.mean(axis=0), tol=1e-9) < d:
                continue
            items = tuple(Point(tuple(p)) for p in sorted(pts))
            return ProblemInstance.make(ConstraintSet.of(items), kind, k=1.0)
    if kind is Kind.INTERSECTING_BALL:
        while True:
            raw = rng.integers(-9, 10, size=(n, d))
            rads = rng.integers(1, 8, size=n)
            balls = {(tuple(float(v) / 10.0 for v in row), float(r) / 10.0)
                     for row, r in zip(raw, rads)}
            if len(balls) < n:
                continue
            items = tuple(Ball(c, r) for c, r in sorted(balls))
            return ProblemInstance.make(ConstraintSet.of(items),
                                        Kind.INTERSECTING_BALL, k=1.0)
    if kind is Kind.LINEAR_FEASIBILITY:
        while True:
            cons = []
            directions = set()
            ok = True
            for _ in range(n):
                a = _nonzero_int_vector(rng, d, 5)
                g = math.gcd(*(int(abs(v)) for v in a)) or 1
                key = tuple(v / g for v in a)
                if key in directions or tuple(-v for v in key) in directions:
                    ok = False
                    break
                directions.add(key)
                b = float(rng.integers(-4, 5))
                cons.append(HalfSpace(a, b, "le"))
            if ok:
                return ProblemInstance.make(ConstraintSet.of(cons),
                                            Kind.LINEAR_FEASIBILITY)
    raise BadSpecError(f"axiom fixtures not defined for kind {kind}")
