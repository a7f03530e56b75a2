"""Low-dimensional linear programming via Seidel's randomized incremental method.

The engine lexicographically maximizes a sequence of linear functionals over
``{x : a.x <= b}`` intersected with a bounding box.  Canonical coordinate
tie-break rows (minimize x_1, then x_2, ...) are appended to every objective,
so a feasible program always has a unique optimal vertex.  This is the
symbolic-perturbation route to non-degenerate behavior: two subsets have equal
optima exactly when they pin the same vertex.

All arithmetic is pure Python so the same code runs on floats (with
tolerances) or on ``fractions.Fraction`` (exact, ``exact=True``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .constraints import BOX_BOUND

_ZERO_TOL = 1e-12


class _Infeasible(Exception):
    def __init__(self, witness):
        super().__init__("infeasible")
        self.witness = witness


@dataclass(frozen=True)
class LexLPResult:
    feasible: bool
    point: tuple | None
    #: constraint indices whose boundaries pin the optimum, in derivation order
    chain: tuple[int, ...]
    #: on infeasibility, indices of a small infeasible subsystem (with the box)
    witness: tuple[int, ...]


def lex_lp_solve(rows, cons, dim, bounds=None, rng=None, exact=False, tol=1e-9):
    """Lexicographically maximize ``rows`` over ``cons`` within a box.

    rows: objective rows (each a length-``dim`` coefficient sequence), compared
        lexicographically; coordinate tie-breaks are appended automatically.
    cons: sequence of ``(a, b)`` pairs encoding ``a . x <= b``.
    bounds: per-variable ``(lo, hi)`` lists, or None for ``[-M, M]^dim`` with
        the default box bound.
    exact: coerce everything to Fraction and compare exactly (tol ignored).
    """
    if rng is None:
        rng = np.random.default_rng(0)
    if bounds is None:
        lo = [-BOX_BOUND] * dim
        hi = [BOX_BOUND] * dim
    else:
        lo = list(bounds[0])
        hi = list(bounds[1])

    if exact:
        conv = Fraction
        tol = 0
        zero_tol = 0
    else:
        conv = float
        zero_tol = _ZERO_TOL

    allrows = [[conv(c) for c in r] for r in rows]
    for j in range(dim):
        tie = [conv(0)] * dim
        tie[j] = conv(-1)
        allrows.append(tie)
    cns = [([conv(c) for c in a], conv(b), i) for i, (a, b) in enumerate(cons)]
    lo = [conv(v) for v in lo]
    hi = [conv(v) for v in hi]

    def feas_slack(a, b):
        if tol == 0:
            return 0
        return tol * max(1.0, max(abs(c) for c in a), abs(b))

    def box_opt(rws, l, h):
        d = len(l)
        x = [None] * d
        for r in rws:
            for k in range(d):
                if x[k] is not None:
                    continue
                if r[k] > zero_tol:
                    x[k] = h[k]
                elif r[k] < -zero_tol:
                    x[k] = l[k]
        for k in range(d):
            if x[k] is None:
                x[k] = l[k]
        return x

    def base(rws, cs, l, h):
        lo1, hi1 = l, h
        lo_src = hi_src = None
        for a, b, idx in cs:
            av = a[0]
            if -zero_tol <= av <= zero_tol:
                if b < -feas_slack(a, b):
                    raise _Infeasible([idx])
                continue
            t = b / av
            if av > 0:
                if t < hi1:
                    hi1, hi_src = t, idx
            else:
                if t > lo1:
                    lo1, lo_src = t, idx
        slack = 0 if tol == 0 else tol * max(1.0, abs(lo1), abs(hi1))
        if lo1 > hi1 + slack:
            raise _Infeasible([lo_src, hi_src])
        for r in rws:
            c = r[0]
            if c > zero_tol:
                return [hi1], [hi_src]
            if c < -zero_tol:
                return [lo1], [lo_src]
        return [lo1], [lo_src]

    def descend(rws, processed, h, l, hgh):
        a, b, idx = h
        j = 0
        best = abs(a[0])
        for k in range(1, len(a)):
            if abs(a[k]) > best:
                best, j = abs(a[k]), k
        aj = a[j]
        coef = [a[k] / aj for k in range(len(a)) if k != j]
        c0 = b / aj

        def drop(vec):
            return vec[:j] + vec[j + 1:]

        def trow(r):
            rj = r[j]
            rest = drop(r)
            return [rest[k] - rj * coef[k] for k in range(len(rest))]

        def tcon(c):
            ca, cb, ci = c
            cj = ca[j]
            rest = drop(ca)
            return ([rest[k] - cj * coef[k] for k in range(len(rest))],
                    cb - cj * c0, ci)

        sub_cons = [tcon(c) for c in processed]
        # bounds on the eliminated variable become ordinary constraints
        sub_cons.append(([-cf for cf in coef], hgh[j] - c0, None))
        sub_cons.append((list(coef), c0 - l[j], None))
        try:
            y, sub_chain = solve([trow(r) for r in rws], sub_cons, drop(l), drop(hgh))
        except _Infeasible as e:
            e.witness = [idx] + e.witness
            raise
        xj = c0 - sum(cf * yv for cf, yv in zip(coef, y))
        return y[:j] + [xj] + y[j:], [idx] + sub_chain

    def solve(rws, cs, l, h):
        d = len(l)
        if d == 1:
            return base(rws, cs, l[0], h[0])
        x = box_opt(rws, l, h)
        chain = []
        if not cs:
            return x, chain
        order = rng.permutation(len(cs))
        processed = []
        for oi in order:
            a, b, idx = cs[oi]
            lhs = sum(ak * xk for ak, xk in zip(a, x))
            if lhs > b + feas_slack(a, b):
                amax = max(abs(c) for c in a)
                if amax <= zero_tol:
                    raise _Infeasible([idx])
                x, chain = descend(rws, processed, (a, b, idx), l, h)
            processed.append((a, b, idx))
        return x, chain

    try:
        x, chain = solve(allrows, cns, lo, hi)
    except _Infeasible as e:
        witness = tuple(sorted({w for w in e.witness if w is not None}))
        return LexLPResult(False, None, (), witness)
    chain = tuple(c for c in chain if c is not None)
    if exact:
        return LexLPResult(True, tuple(x), chain, ())
    return LexLPResult(True, tuple(float(v) for v in x), chain, ())
