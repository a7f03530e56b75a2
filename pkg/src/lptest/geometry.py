"""Certified solvers for the canonical geometric LP-type problems.

Covers the smallest enclosing ball (randomized incremental, move-to-front),
the smallest ball intersecting a set of balls (randomized incremental over a
numerical minimax basis primitive), the smallest annulus in the squared-radii
LP formulation, and the regular-simplex circumradius primitive used by the
lower-bound instance families.

Inputs are assumed normalized into roughly [-1, 1]^d; absolute tolerances
follow ``constraints.TOL``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .constraints import (
    BOX_BOUND,
    TOL,
    AnnulusCertificate,
    Ball,
    BallCertificate,
)
from .errors import NumericalFailure
from .seidel import lex_lp_solve


def circumsphere(points: np.ndarray):
    """Center and squared radius of the smallest sphere through all ``points``.

    The center lies in the affine hull of the points (minimal-norm solution of
    the normal equations), which is the basis primitive Welzl's algorithm
    needs.  Returns None when the points admit no common sphere in their
    affine hull (affinely dependent in an inconsistent way).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    p0 = pts[0]
    if len(pts) == 1:
        return p0.copy(), 0.0
    u = pts[1:] - p0
    gram = u @ u.T
    rhs = 0.5 * np.einsum("ij,ij->i", u, u)
    w, *_ = np.linalg.lstsq(gram, rhs, rcond=1e-12)
    offset = u.T @ w
    center = p0 + offset
    r2 = float(offset @ offset)
    # consistency: every defining point must sit on the sphere
    d2 = np.einsum("ij,ij->i", pts - center, pts - center)
    scale = max(1.0, r2)
    if np.any(np.abs(d2 - r2) > 1e-7 * scale):
        return None
    return center, r2


def circumsphere_exact(points: Sequence[Sequence[Fraction]]):
    """Exact-rational circumsphere: (center, radius^2) as Fractions, or None.

    Only full-rank boundary sets are accepted; used by the brute-force oracle.
    """
    pts = [list(map(Fraction, p)) for p in points]
    p0 = pts[0]
    if len(pts) == 1:
        return p0, Fraction(0)
    u = [[pi - qi for pi, qi in zip(p, p0)] for p in pts[1:]]
    m = len(u)
    gram = [[sum(u[i][k] * u[j][k] for k in range(len(p0))) for j in range(m)]
            for i in range(m)]
    rhs = [Fraction(1, 2) * sum(v * v for v in u[i]) for i in range(m)]
    w = _solve_fraction_system(gram, rhs)
    if w is None:
        return None
    offset = [sum(w[i] * u[i][k] for i in range(m)) for k in range(len(p0))]
    center = [a + b for a, b in zip(p0, offset)]
    r2 = sum(v * v for v in offset)
    for p in pts:
        d2 = sum((a - c) * (a - c) for a, c in zip(p, center))
        if d2 != r2:
            return None
    return center, r2


def _solve_fraction_system(mat, rhs):
    n = len(mat)
    a = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if a[r][col] != 0:
                piv = r
                break
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [v / pv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def min_enclosing_ball(points, rng=None) -> BallCertificate:
    """Smallest enclosing ball by Welzl's move-to-front algorithm.

    ``points``: array-like of shape (n, d), n >= 1, d <= 16.  Exact duplicate
    points are collapsed before solving; support indices refer to the input
    order.  Raises NumericalFailure if a basis solve degenerates.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    n, d = pts.shape
    if n < 1:
        raise ValueError("need at least one point")
    if d > 16:
        raise ValueError("ambient dimension capped at 16 for stable basis solves")
    rng = np.random.default_rng(0) if rng is None else rng

    first_idx: dict[tuple, int] = {}
    for i, p in enumerate(map(tuple, pts)):
        first_idx.setdefault(p, i)
    uniq = list(first_idx.items())
    order = [uniq[i] for i in rng.permutation(len(uniq))]
    work = [(np.array(p), i) for p, i in order]

    def trivial(boundary):
        if not boundary:
            return None
        res = circumsphere(np.array([b[0] for b in boundary]))
        if res is None:
            raise NumericalFailure("degenerate boundary set in ball solve")
        return res

    def contains(ball, p):
        if ball is None:
            return False
        c, r2 = ball
        dp = p - c
        return float(dp @ dp) <= r2 * (1 + 1e-12) + 1e-14

    def mtf(end, boundary):
        ball = trivial(boundary)
        if len(boundary) == d + 1:
            return ball, boundary
        support = boundary
        i = 0
        while i < end:
            p, _ = work[i]
            if not contains(ball, p):
                ball, support = mtf(i, boundary + [work[i]])
                work.insert(0, work.pop(i))
            i += 1
        return ball, support

    ball, support = mtf(len(work), [])
    if ball is None:  # single point
        ball, support = (work[0][0], 0.0), [work[0]]
    center, r2 = ball
    radius = math.sqrt(max(r2, 0.0))
    sup_idx = tuple(sorted(i for _, i in support))
    return BallCertificate(tuple(float(c) for c in center), radius, sup_idx)


# --------------------------------------------------------------------------
# Smallest ball intersecting a set of balls
# --------------------------------------------------------------------------


def _minimax_balls(centers: np.ndarray, radii: np.ndarray):
    """Minimize ``max_i (|x - c_i| - rho_i)``; returns (x, value).

    Closed forms for one or two bodies; SLSQP on the epigraph otherwise.
    """
    m, d = centers.shape
    if m == 1:
        return centers[0].copy(), float(-radii[0])
    if m == 2:
        c1, c2 = centers
        dist = float(np.linalg.norm(c2 - c1))
        if dist < 1e-15:
            return c1.copy(), float(-min(radii))
        t = (dist + radii[0] - radii[1]) / (2.0 * dist)
        t = min(max(t, 0.0), 1.0)
        x = c1 + t * (c2 - c1)
        val = max(float(np.linalg.norm(x - c1) - radii[0]),
                  float(np.linalg.norm(x - c2) - radii[1]))
        return x, val

    x0 = centers.mean(axis=0)
    t0 = float(np.max(np.linalg.norm(centers - x0, axis=1) - radii))

    def objective(z):
        return z[-1]

    def obj_grad(z):
        g = np.zeros(d + 1)
        g[-1] = 1.0
        return g

    constraints = []
    for i in range(m):
        ci = centers[i]
        rho = radii[i]

        def fun(z, ci=ci, rho=rho):
            return z[-1] - (np.linalg.norm(z[:-1] - ci) - rho)

        def jac(z, ci=ci):
            diff = z[:-1] - ci
            nrm = np.linalg.norm(diff)
            g = np.empty(d + 1)
            if nrm < 1e-14:
                g[:-1] = 0.0
            else:
                g[:-1] = -diff / nrm
            g[-1] = 1.0
            return g

        constraints.append({"type": "ineq", "fun": fun, "jac": jac})

    res = minimize(objective, np.append(x0, t0 + 1e-3), jac=obj_grad,
                   method="SLSQP", constraints=constraints,
                   options={"ftol": 1e-14, "maxiter": 400})
    if not res.success and res.status != 4:  # 4: inequality incompatibility noise
        raise NumericalFailure(f"minimax basis primitive failed: {res.message}")
    x = res.x[:-1]
    val = float(np.max(np.linalg.norm(centers - x, axis=1) - radii))
    return x, val


def _intersecting_ball_value(balls: Sequence[Ball], rng=None):
    """Unclipped minimax depth plus certificate for the intersecting-ball problem."""
    if not balls:
        raise ValueError("need at least one ball")
    seen: dict[tuple, int] = {}
    for i, b in enumerate(balls):
        seen.setdefault((b.center, b.radius), i)
    uniq = list(seen.items())
    centers = np.array([list(k[0]) for k, _ in uniq], dtype=float)
    radii = np.array([k[1] for k, _ in uniq], dtype=float)
    m, d = centers.shape

    if m == 1:
        x, val = centers[0], float(-radii[0])
        support = [0]
    else:
        gaps = np.linalg.norm(centers[:, None] - centers[None, :], axis=2) \
            - radii[None, :] - radii[:, None]
        i0, j0 = np.unravel_index(np.argmax(gaps), gaps.shape)
        support = sorted({int(i0), int(j0)})
        x, val = _minimax_balls(centers[support], radii[support])
        for _ in range(60 * m + 60):
            resid = np.linalg.norm(centers - x, axis=1) - radii
            worst = int(np.argmax(resid))
            if resid[worst] <= val + 1e-9:
                break
            trial = sorted(set(support) | {worst})
            x, val = _minimax_balls(centers[trial], radii[trial])
            tresid = np.linalg.norm(centers[trial] - x, axis=1) - radii[trial]
            support = [trial[k] for k in range(len(trial))
                       if tresid[k] >= val - 1e-7 or trial[k] == worst]
            if len(support) > d + 2:
                keep = np.argsort(-tresid)[: d + 2]
                support = sorted(trial[k] for k in keep)
        else:
            raise NumericalFailure("intersecting-ball iteration budget exhausted")

    orig_support = tuple(sorted(uniq[s][1] for s in support))
    cert = BallCertificate(tuple(float(c) for c in x), max(val, 0.0), orig_support)
    return val, cert


def min_intersecting_ball(balls: Sequence[Ball], rng=None) -> BallCertificate:
    """Smallest ball intersecting every ball body (points are radius-0 balls)."""
    _, cert = _intersecting_ball_value(balls, rng)
    return cert


# --------------------------------------------------------------------------
# Smallest annulus (squared-radii objective)
# --------------------------------------------------------------------------


def annulus_lp_rows(points):
    """Constraint rows of the squared-radii annulus LP in variables (c, a, b).

    Per point p: ``|p|^2 - 2 p.c <= a`` and ``|p|^2 - 2 p.c >= b``, both
    rewritten as <=-rows.  Row 2i is the outer (a) constraint of point i,
    row 2i+1 the inner (b) constraint.
    """
    rows = []
    for p in points:
        g = sum(v * v for v in p)
        outer = ([-2.0 * v for v in p] + [-1.0, 0.0], -g)
        inner = ([2.0 * v for v in p] + [0.0, 1.0], g)
        rows.append(outer)
        rows.append(inner)
    return rows


def min_annulus(points, rng=None) -> AnnulusCertificate:
    """Smallest annulus containing the points, minimizing r_outer^2 - r_inner^2.

    Solved exactly as an LP in the lifted variables (center, a, b); for d = 2
    the objective is the annulus area divided by pi.  Degenerate directions
    (collinear inputs) ride to the solver's bounding box, yielding a far-away
    center that approximates a slab.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    n, d = pts.shape
    uniq: dict[tuple, int] = {}
    for i, p in enumerate(map(tuple, pts)):
        uniq.setdefault(p, i)
    plist = list(uniq.keys())
    cons = annulus_lp_rows(plist)
    dim = d + 2
    # primary objective: maximize b - a  (= minimize a - b)
    primary = [0.0] * d + [-1.0, 1.0]
    lo = [-BOX_BOUND] * d + [-10.0 * d * BOX_BOUND] * 2
    hi = [BOX_BOUND] * d + [10.0 * d * BOX_BOUND] * 2
    rng = np.random.default_rng(0) if rng is None else rng
    res = lex_lp_solve([primary], cons, dim, bounds=(lo, hi), rng=rng)
    if not res.feasible:
        raise NumericalFailure("annulus LP reported infeasible (should not happen)")
    y = res.point
    center = y[:d]
    a, b = y[d], y[d + 1]
    c2 = sum(v * v for v in center)
    r_out = math.sqrt(max(a + c2, 0.0))
    r_in = math.sqrt(max(b + c2, 0.0))
    support = tuple(sorted({uniq[plist[r // 2]] for r in res.chain}))
    return AnnulusCertificate(tuple(center), r_in, r_out, a, b, support)


# --------------------------------------------------------------------------
# Regular simplex primitives
# --------------------------------------------------------------------------


def simplex_circumradius(j: int) -> float:
    """Circumradius of a unit regular j-simplex: sqrt(j / (2 (j + 1)))."""
    if j < 1:
        raise ValueError("j must be >= 1")
    return math.sqrt(j / (2.0 * (j + 1)))


def unit_simplex_points(j: int) -> np.ndarray:
    """Vertices of a unit-side regular j-simplex, embedded in R^(j+1)."""
    return np.eye(j + 1) / math.sqrt(2.0)


def scaled_basis_simplex(num_vertices: int, side: float) -> np.ndarray:
    """``num_vertices`` vertices of a regular simplex of side ``side``.

    Embedded as scaled standard basis vectors in R^num_vertices; the
    circumradius of any m-vertex subset is ``side * sqrt((m-1) / (2m))``.
    """
    return np.eye(num_vertices) * (side / math.sqrt(2.0))
