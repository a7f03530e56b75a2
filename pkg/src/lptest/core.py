"""Objective dispatch and exact subset combinatorics for LP-type instances.

``phi`` maps a subset of an instance's constraints to a totally ordered value
with a certificate; ``violators`` and ``extreme_elements`` implement the two
subset roles the sampling identity relates.  ``sampling_lemma_check`` and
``check_lp_type_axioms`` enumerate small instances exhaustively; the
``bruteforce_phi`` oracle recomputes objectives by basis enumeration and is
used only for cross-checks.

Orientation conventions: phi grows as subsets grow.  For the max-x1 LP kind
the stored value is the negated optimum, with the full optimal vertex as a
lexicographic tie-break; the empty set maps to -inf and infeasible LP subsets
to +inf.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from .constraints import (
    PHI_EMPTY,
    PHI_INFEASIBLE,
    TOL,
    AnnulusCertificate,
    Ball,
    BallCertificate,
    Constraint,
    HalfSpace,
    Kind,
    LabeledPoint,
    LPCertificate,
    PhiValue,
    Point,
    ProblemInstance,
    SubsetView,
)
from .errors import NumericalFailure, TooLargeError
from .geometry import (
    _intersecting_ball_value,
    _minimax_balls,
    circumsphere,
    min_annulus,
    min_enclosing_ball,
)
from .linprog import solve_lp_max_x1, vertex_enumeration_max_x1


def _as_indices(instance: ProblemInstance, subset) -> tuple[int, ...]:
    if isinstance(subset, SubsetView):
        return subset.indices
    return tuple(sorted(int(i) for i in subset))


def _first_expanded_in(instance: ProblemInstance, indices, item_idx: int) -> int:
    cset = instance.constraints
    return min(i for i in indices if cset.item_index(i) == item_idx)


def phi(instance: ProblemInstance, subset, rng=None) -> PhiValue:
    """Objective value of a subset, with its certificate.

    Deterministic: solver-internal randomization is freshly seeded per call.
    phi of the empty subset is -inf; an infeasible LP subset maps to +inf.
    """
    indices = _as_indices(instance, subset)
    if not indices:
        return PHI_EMPTY
    cset = instance.constraints
    item_idx = cset.distinct(indices)
    items = [cset.items[i] for i in item_idx]

    if instance.kind is Kind.MEB:
        pts = np.array([it.coords for it in items], dtype=float)
        cert = min_enclosing_ball(pts, rng=rng)
        support = tuple(sorted(
            _first_expanded_in(instance, indices, item_idx[s]) for s in cert.support))
        cert = BallCertificate(cert.center, cert.radius, support)
        return PhiValue(cert.radius, (), cert)

    if instance.kind is Kind.INTERSECTING_BALL:
        value, cert = _intersecting_ball_value(items, rng=rng)
        support = tuple(sorted(
            _first_expanded_in(instance, indices, item_idx[s]) for s in cert.support))
        cert = BallCertificate(cert.center, cert.radius, support)
        return PhiValue(value, (), cert)

    if instance.kind is Kind.ANNULUS:
        pts = np.array([it.coords for it in items], dtype=float)
        cert = min_annulus(pts, rng=rng)
        support = tuple(sorted(
            _first_expanded_in(instance, indices, item_idx[s]) for s in cert.support))
        cert = AnnulusCertificate(cert.center, cert.r_inner, cert.r_outer,
                                  cert.lift_a, cert.lift_b, support)
        tie = cert.center + (cert.lift_a, cert.lift_b)
        return PhiValue(cert.squared_width, tie, cert)

    if instance.kind is Kind.LINEAR_FEASIBILITY:
        lp = solve_lp_max_x1(items, rng=rng)
        if lp.status == "infeasible":
            return PHI_INFEASIBLE
        support = tuple(sorted(
            _first_expanded_in(instance, indices, item_idx[s]) for s in lp.basis))
        cert = LPCertificate(lp.point, lp.objective, support,
                             on_box=lp.status == "unbounded")
        return PhiValue(-lp.objective, lp.point, cert)

    raise ValueError(f"phi undefined for kind {instance.kind}; "
                     "separability instances are tested via their reduction")


def item_violates(kind: Kind, value: PhiValue, item: Constraint,
                  tol: float = TOL) -> bool:
    """Does adding ``item`` change phi, judged against the certificate?

    Certificate membership is numerically stabler than re-solving and
    comparing objectives; on general-position data the two agree exactly.
    """
    if value.is_empty:
        return True
    if value.is_infeasible:
        return False
    cert = value.certificate
    if kind is Kind.MEB:
        return not cert.contains_point(item.coords, tol)
    if kind is Kind.INTERSECTING_BALL:
        resid = math.dist(cert.center, item.center) - item.radius
        return resid > value.value + tol
    if kind is Kind.ANNULUS:
        return not cert.contains_point(item.coords, tol)
    if kind is Kind.LINEAR_FEASIBILITY:
        return not cert.satisfies(item, tol)
    raise ValueError(kind)


def violators(instance: ProblemInstance, subset, rng=None,
              phi_value: PhiValue | None = None) -> tuple[int, ...]:
    """Expanded indices of S \\ R whose addition changes phi(R)."""
    indices = _as_indices(instance, subset)
    value = phi(instance, indices, rng=rng) if phi_value is None else phi_value
    cset = instance.constraints
    inside = set(indices)
    decision: dict[int, bool] = {}
    out = []
    for i in range(cset.n):
        if i in inside:
            continue
        j = cset.item_index(i)
        if j not in decision:
            decision[j] = item_violates(instance.kind, value, cset.items[j])
        if decision[j]:
            out.append(i)
    return tuple(out)


def extreme_elements(instance: ProblemInstance, subset, rng=None) -> tuple[int, ...]:
    """Expanded indices s in R with phi(R \\ {s}) != phi(R).

    Decided by the violation predicate against the certificate of R \\ {s},
    which is exactly "s is a violator of R \\ {s}".  An element whose
    constraint occurs elsewhere in R is never extreme (phi is
    multiplicity-invariant).
    """
    indices = _as_indices(instance, subset)
    if not indices:
        raise ValueError("extreme elements of the empty subset are undefined")
    cset = instance.constraints
    counts: dict[int, int] = {}
    for i in indices:
        j = cset.item_index(i)
        counts[j] = counts.get(j, 0) + 1
    out = []
    for i in indices:
        j = cset.item_index(i)
        if counts[j] > 1:
            continue
        rest = tuple(x for x in indices if x != i)
        value = phi(instance, rest, rng=rng)
        if item_violates(instance.kind, value, cset.items[j]):
            out.append(i)
    return tuple(out)


# --------------------------------------------------------------------------
# Exact enumeration checks
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SamplingLemmaReport:
    n: int
    r: int
    v_r: Fraction
    x_r1: Fraction
    lhs: Fraction  # v_r / (n - r)
    rhs: Fraction  # x_{r+1} / (r + 1)
    equal: bool
    violator_bound: Fraction  # delta (n - r) / (r + 1)
    bound_ok: bool


def sampling_lemma_check(instance: ProblemInstance, r: int,
                         guard: int = 10**6) -> SamplingLemmaReport:
    """Exact check of the sampling identity v_r/(n-r) = x_{r+1}/(r+1).

    Both expectations are computed by full enumeration of the r- and
    (r+1)-subsets, with rational arithmetic for the averages.  Also evaluates
    the dimension-based violator bound.
    """
    n = instance.n
    if not 0 <= r <= n - 1:
        raise ValueError(f"need 0 <= r <= n-1, got r={r}, n={n}")
    if math.comb(n, r) > guard or math.comb(n, r + 1) > guard:
        raise TooLargeError(f"C({n},{r}) exceeds enumeration guard {guard}")

    cache: dict[tuple[int, ...], PhiValue] = {}

    def cached_phi(idx: tuple[int, ...]) -> PhiValue:
        if idx not in cache:
            cache[idx] = phi(instance, idx)
        return cache[idx]

    cset = instance.constraints
    v_total = 0
    for subset in itertools.combinations(range(n), r):
        value = cached_phi(subset)
        inside = set(subset)
        for i in range(n):
            if i not in inside and item_violates(
                    instance.kind, value, cset.items[cset.item_index(i)]):
                v_total += 1

    x_total = 0
    for q in itertools.combinations(range(n), r + 1):
        counts: dict[int, int] = {}
        for i in q:
            j = cset.item_index(i)
            counts[j] = counts.get(j, 0) + 1
        for i in q:
            j = cset.item_index(i)
            if counts[j] > 1:
                continue
            rest = tuple(x for x in q if x != i)
            if item_violates(instance.kind, cached_phi(rest), cset.items[j]):
                x_total += 1

    v_r = Fraction(v_total, math.comb(n, r))
    x_r1 = Fraction(x_total, math.comb(n, r + 1))
    lhs = v_r / (n - r)
    rhs = x_r1 / (r + 1)
    bound = Fraction(instance.delta * (n - r), r + 1)
    return SamplingLemmaReport(n, r, v_r, x_r1, lhs, rhs, lhs == rhs,
                               bound, v_r <= bound)


@dataclass(frozen=True)
class AxiomReport:
    passed: bool
    monotonicity_ok: bool
    locality_ok: bool
    monotonicity_witness: tuple | None
    locality_witness: tuple | None
    subsets_checked: int


def check_lp_type_axioms(instance: ProblemInstance,
                         max_subset_size: int | None = None,
                         phi_fn: Callable[[tuple[int, ...]], PhiValue] | None = None,
                         value_tol: float = 1e-7) -> AxiomReport:
    """Exhaustive monotonicity and locality check over all subset chains.

    Monotonicity: phi(A) <= phi(B) for every nested pair A subset of B.
    Locality: phi(A) = phi(B) = phi(A + x) implies phi(A) = phi(B + x).
    Equality compares values and tie-break vectors within ``value_tol``;
    solver noise sits well below it on general-position fixtures.
    ``phi_fn`` substitutes a custom objective (used to demonstrate that the
    check catches non-LP-type functions).
    """
    n = instance.n
    if 3**n > 5 * 10**6:
        raise TooLargeError(f"3^{n} nested pairs exceed the enumeration guard")
    cap = n if max_subset_size is None else min(max_subset_size, n)
    fn = (lambda idx: phi(instance, idx)) if phi_fn is None else phi_fn

    cache: dict[tuple[int, ...], PhiValue] = {}

    def val(idx: tuple[int, ...]) -> PhiValue:
        if idx not in cache:
            cache[idx] = fn(idx)
        return cache[idx]

    ground = range(n)
    mono_witness = None
    loc_witness = None
    checked = 0
    for size_b in range(0, cap + 1):
        for b in itertools.combinations(ground, size_b):
            vb = val(b)
            bset = set(b)
            # every proper and improper subset A of B
            for size_a in range(0, size_b + 1):
                for a in itertools.combinations(b, size_a):
                    checked += 1
                    va = val(a)
                    if mono_witness is None and not va.leq(vb, value_tol):
                        mono_witness = (a, b, va.value, vb.value)
                    if size_b >= cap:
                        continue
                    if not va.close_to(vb, value_tol):
                        continue
                    for x in ground:
                        if x in bset:
                            continue
                        ax = tuple(sorted(a + (x,)))
                        if not va.close_to(val(ax), value_tol):
                            continue
                        bx = tuple(sorted(b + (x,)))
                        if loc_witness is None and not va.close_to(val(bx), value_tol):
                            loc_witness = (a, b, x, va.value, val(bx).value)
    return AxiomReport(mono_witness is None and loc_witness is None,
                       mono_witness is None, loc_witness is None,
                       mono_witness, loc_witness, checked)


# --------------------------------------------------------------------------
# Brute-force oracle
# --------------------------------------------------------------------------


def bruteforce_phi(instance: ProblemInstance, subset, guard: int = 12) -> PhiValue:
    """Recompute phi by exhaustive basis enumeration; test oracle only.

    Geometric kinds enumerate every candidate basis of size <= delta and keep
    the best one that dominates all constraints; the LP kind runs the
    vertex-enumeration oracle.  Values (not tie-breaks) are comparable to the
    main solvers'.
    """
    indices = _as_indices(instance, subset)
    if len(indices) > guard:
        raise TooLargeError(f"bruteforce guard: |subset| = {len(indices)} > {guard}")
    if not indices:
        return PHI_EMPTY
    cset = instance.constraints
    items = [cset.items[i] for i in cset.distinct(indices)]
    d = instance.dim

    if instance.kind is Kind.MEB:
        pts = np.array([it.coords for it in items], dtype=float)
        best = None
        for size in range(1, min(len(pts), d + 1) + 1):
            for combo in itertools.combinations(range(len(pts)), size):
                res = circumsphere(pts[list(combo)])
                if res is None:
                    continue
                center, r2 = res
                radius = math.sqrt(max(r2, 0.0))
                dist = np.linalg.norm(pts - center, axis=1)
                if np.all(dist <= radius + 1e-9):
                    if best is None or radius < best[0]:
                        best = (radius, center, combo)
        if best is None:
            raise NumericalFailure("no covering candidate ball found")
        radius, center, combo = best
        cert = BallCertificate(tuple(float(c) for c in center), radius, tuple(combo))
        return PhiValue(radius, (), cert)

    if instance.kind is Kind.INTERSECTING_BALL:
        centers = np.array([it.center for it in items], dtype=float)
        radii = np.array([it.radius for it in items], dtype=float)
        best = None
        for size in range(1, min(len(items), d + 1) + 1):
            for combo in itertools.combinations(range(len(items)), size):
                x, val = _minimax_balls(centers[list(combo)], radii[list(combo)])
                resid = np.linalg.norm(centers - x, axis=1) - radii
                if np.max(resid) <= val + 1e-7:
                    if best is None or val < best[0]:
                        best = (val, x, combo)
        if best is None:
            raise NumericalFailure("no dominating minimax candidate found")
        val, x, combo = best
        cert = BallCertificate(tuple(float(v) for v in x), max(val, 0.0),
                               tuple(combo))
        return PhiValue(val, (), cert)

    if instance.kind is Kind.ANNULUS:
        return _bruteforce_annulus(items, d)

    if instance.kind is Kind.LINEAR_FEASIBILITY:
        status, objective = vertex_enumeration_max_x1(items)
        if status == "infeasible":
            return PHI_INFEASIBLE
        return PhiValue(-objective, (),
                        LPCertificate((), objective, (), status == "unbounded"))

    raise ValueError(instance.kind)


def _bruteforce_annulus(items, d) -> PhiValue:
    """Enumerate square subsystems of the lifted annulus rows.

    Every interior optimum of the squared-radii LP is pinned by d+2 tight
    point rows, so solving all (d+2)-row systems and keeping the best valid
    band finds it.  Assumes general position (no box-pinned optimum).
    """
    pts = np.array([it.coords for it in items], dtype=float)
    m = len(pts)
    g = np.einsum("ij,ij->i", pts, pts)
    # row 2i: outer contact of point i; row 2i+1: inner contact
    rows = []
    for i in range(m):
        rows.append((np.concatenate([-2.0 * pts[i], [-1.0, 0.0]]), -g[i]))
        rows.append((np.concatenate([2.0 * pts[i], [0.0, 1.0]]), g[i]))
    nvar = d + 2
    best = None

    def consider(y):
        a, b = y[d], y[d + 1]
        resid = g - 2.0 * (pts @ y[:d])
        if np.all(resid <= a + 1e-9) and np.all(resid >= b - 1e-9):
            width = a - b
            nonlocal best
            if best is None or width < best[0] - 1e-15:
                best = (width, y.copy())

    if 2 * m < nvar:
        mat = np.array([r[0] for r in rows])
        rhs = np.array([r[1] for r in rows])
        y, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
        consider(y)
    for combo in itertools.combinations(range(2 * m), nvar):
        mat = np.array([rows[i][0] for i in combo])
        rhs = np.array([rows[i][1] for i in combo])
        try:
            y = np.linalg.solve(mat, rhs)
        except np.linalg.LinAlgError:
            continue
        consider(y)
    # width-zero candidates: all points on one circle (rank-deficient systems)
    for size in range(1, min(m, d + 1) + 1):
        for combo in itertools.combinations(range(m), size):
            res = circumsphere(pts[list(combo)])
            if res is None:
                continue
            center, r2 = res
            c2 = float(center @ center)
            y = np.concatenate([center, [r2 - c2, r2 - c2]])
            consider(y)
    if best is None:
        raise NumericalFailure("annulus brute force found no valid band "
                               "(box-pinned or degenerate input?)")
    width, y = best
    center = tuple(float(v) for v in y[:d])
    a, b = float(y[d]), float(y[d + 1])
    c2 = sum(v * v for v in center)
    cert = AnnulusCertificate(center, math.sqrt(max(b + c2, 0.0)),
                              math.sqrt(max(a + c2, 0.0)), a, b, ())
    return PhiValue(width, tuple(center) + (a, b), cert)
