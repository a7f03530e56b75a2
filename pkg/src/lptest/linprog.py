"""Low-dimensional LP solving and the linear-feasibility property testers.

Provides the max-x1 solver (Seidel engine with lexicographic tie-breaking),
an independent vertex-enumeration oracle, the one-sided feasibility tester,
the exact maximum-feasible-subsystem search (branch and bound over
irreducible infeasible subsystems), and the tolerant feasibility tester
built on it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .constraints import BOX_BOUND, TOL, ConstraintSet, HalfSpace
from .errors import EmptyInstanceError, TooLargeError
from .seidel import lex_lp_solve
from .verdict import (
    ACCEPT,
    CAUSE_NO_VIOLATION,
    CAUSE_PHI_EXCEEDS_K,
    CAUSE_VIOLATOR_FOUND,
    REJECT,
    TesterVerdict,
)

LinearConstraint = HalfSpace


@dataclass(frozen=True)
class LPResult:
    """Outcome of maximizing x1 over half-space constraints within the box.

    status 'unbounded' means the optimum sits on the implicit bounding box in
    the x1 direction; ``point`` is still the boxed optimum and remains a valid
    feasible point.
    """

    status: str  # "feasible" | "infeasible" | "unbounded"
    point: tuple[float, ...] | None
    objective: float | None
    basis: tuple[int, ...] = ()
    infeasible_witness: tuple[int, ...] = ()
    ray: tuple[float, ...] | None = None

    @property
    def has_point(self) -> bool:
        return self.point is not None


def _unbounded_ray(cons_le, dim, rng):
    rows = [[1.0 if j == 0 else 0.0 for j in range(dim)]]
    cone = [(a, 0.0) for a, _ in cons_le]
    res = lex_lp_solve(rows, cone, dim, bounds=([-1.0] * dim, [1.0] * dim), rng=rng)
    if res.feasible and res.point[0] > 1e-9:
        return res.point
    return None


def solve_lp_max_x1(constraints: Sequence[HalfSpace], rng=None, exact=False,
                    box=BOX_BOUND) -> LPResult:
    """Maximize x1 subject to the given half-spaces, inside ``[-box, box]^d``.

    Degeneracy is resolved by the engine's lexicographic tie-break, so the
    returned point is the unique lexicographically-minimal optimum.  An empty
    constraint list is allowed (the box corner comes back, flagged unbounded).
    """
    constraints = list(constraints)
    if constraints:
        dim = constraints[0].dim
    else:
        raise ValueError("dimension is ambiguous for an empty constraint list; "
                         "pass at least one constraint")
    rng = np.random.default_rng(0) if rng is None else rng
    cons_le = [hs.as_le() for hs in constraints]
    rows = [[1.0 if j == 0 else 0.0 for j in range(dim)]]
    res = lex_lp_solve(rows, cons_le, dim, bounds=([-box] * dim, [box] * dim),
                       rng=rng, exact=exact)
    if not res.feasible:
        return LPResult("infeasible", None, None, (), res.witness)
    x = res.point
    objective = x[0]
    if objective >= box * (1.0 - 1e-9):
        ray = None if exact else _unbounded_ray(cons_le, dim, rng)
        return LPResult("unbounded", x, objective, res.chain, (), ray)
    return LPResult("feasible", x, objective, res.chain)


def vertex_enumeration_max_x1(constraints: Sequence[HalfSpace], box=BOX_BOUND,
                              tol=TOL):
    """Independent oracle: enumerate candidate vertices, keep the feasible best.

    Candidate vertices are intersections of d hyperplanes drawn from the
    constraint boundaries and the box facets.  Returns (status, objective).
    """
    constraints = list(constraints)
    dim = constraints[0].dim
    rows = [hs.as_le() for hs in constraints]
    planes = [(np.array(a, dtype=float), float(b)) for a, b in rows]
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = 1.0
        planes.append((e.copy(), box))
        planes.append((-e, box))
    a_mat = np.array([a for a, _ in rows], dtype=float) if rows else None
    b_vec = np.array([b for _, b in rows], dtype=float) if rows else None
    scale = np.maximum(1.0, np.abs(a_mat).max(axis=1)) if rows else None

    best = None
    for combo in itertools.combinations(range(len(planes)), dim):
        mat = np.array([planes[i][0] for i in combo])
        rhs = np.array([planes[i][1] for i in combo])
        try:
            x = np.linalg.solve(mat, rhs)
        except np.linalg.LinAlgError:
            continue
        if np.abs(x).max() > box * (1 + 1e-9):
            continue
        if rows and np.any(a_mat @ x - b_vec > tol * scale * max(1.0, np.abs(x).max())):
            continue
        if best is None or x[0] > best:
            best = float(x[0])
    if best is None:
        return "infeasible", None
    if best >= box * (1.0 - 1e-9):
        return "unbounded", best
    return "feasible", best


# --------------------------------------------------------------------------
# Linear Feasibility Tester
# --------------------------------------------------------------------------


def _distinct_halfspaces(cset: ConstraintSet, expanded_indices):
    item_idx = cset.distinct(expanded_indices)
    return [cset.items[i] for i in item_idx]


def run_linear_feasibility_tester(constraints: ConstraintSet, epsilon: float,
                                  seed: int = 0, rng=None,
                                  sample_multiplier: float = 10.0,
                                  check_rounds: int | None = None) -> TesterVerdict:
    """One-sided feasibility tester for a multiset of half-space constraints.

    Samples ``ceil(10 d / epsilon)`` constraints, solves max x1 on the sample,
    rejects on infeasibility, then spot-checks the solution point against
    ``ceil(2 / epsilon)`` constraints drawn uniformly from the whole multiset.
    """
    n = constraints.n
    if n == 0:
        raise EmptyInstanceError("no constraints")
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must be in (0, 1]")
    d = constraints.dim
    rng = np.random.default_rng(seed) if rng is None else rng
    r = min(math.ceil(sample_multiplier * d / epsilon), n)
    sample = tuple(sorted(int(i) for i in rng.choice(n, size=r, replace=False)))
    reads = set(sample)
    rounds = math.ceil(2.0 / epsilon) if check_rounds is None else check_rounds

    lp = solve_lp_max_x1(_distinct_halfspaces(constraints, sample),
                         rng=np.random.default_rng(derive_solver_seed(seed)))
    if lp.status == "infeasible":
        verdict = TesterVerdict(REJECT, len(reads), CAUSE_PHI_EXCEEDS_K, None, sample)
        assert verdict.queries_used <= r + rounds
        return verdict

    x = lp.point
    for _ in range(rounds):
        y = int(rng.integers(n))  # drawn from all of S, repeats allowed
        reads.add(y)
        if not constraints.item_at(y).satisfied_by(x):
            verdict = TesterVerdict(REJECT, len(reads), CAUSE_VIOLATOR_FOUND, y, sample)
            assert verdict.queries_used <= r + rounds
            return verdict
    verdict = TesterVerdict(ACCEPT, len(reads), CAUSE_NO_VIOLATION, None, sample)
    assert verdict.queries_used <= r + rounds
    return verdict


def derive_solver_seed(seed: int) -> int:
    # decouples the LP engine's internal shuffle from the sampling stream
    return (int(seed) * 0x9E3779B1 + 0x7F4A7C15) & 0xFFFFFFFF


# --------------------------------------------------------------------------
# Exact maximum feasible subsystem (MAX-FS)
# --------------------------------------------------------------------------


def _feasible_subset(cons_le, dim, idx_tuple, box):
    sub = [cons_le[i] for i in idx_tuple]
    rows = [[1.0 if j == 0 else 0.0 for j in range(dim)]]
    res = lex_lp_solve(rows, sub, dim, bounds=([-box] * dim, [box] * dim),
                       rng=np.random.default_rng(0))
    if res.feasible:
        return True, res.point, ()
    witness = tuple(idx_tuple[w] for w in res.witness)
    return False, None, witness


def max_feasible_subset(constraints: Sequence[HalfSpace], guard: int = 25,
                        weights: Sequence[float] | None = None,
                        box=BOX_BOUND):
    """Exact maximum-cardinality (or maximum-weight) feasible subsystem.

    Branch and bound: infeasible nodes branch on the members of an irreducible
    infeasible subsystem extracted by deletion filtering; feasible nodes close
    with their full active set.  A greedy pass seeds the incumbent, so the
    result never falls below it.  Exponential in the worst case; guarded.

    Returns ``(subset_indices, point)`` with indices sorted ascending and
    ``point`` feasible for exactly that subsystem.  Ties in value go to the
    lexicographically smallest index set.
    """
    constraints = list(constraints)
    n = len(constraints)
    if n == 0:
        return (), None
    if n > guard:
        raise TooLargeError(f"MAX-FS guard: {n} > {guard}")
    dim = constraints[0].dim
    w = [1.0] * n if weights is None else [float(v) for v in weights]
    cons_le = [hs.as_le() for hs in constraints]

    def weight(idx):
        return sum(w[i] for i in idx)

    # greedy incumbent, heaviest first
    order = sorted(range(n), key=lambda i: (-w[i], i))
    kept: list[int] = []
    for i in order:
        ok, _, _ = _feasible_subset(cons_le, dim, tuple(sorted(kept + [i])), box)
        if ok:
            kept.append(i)
    best_idx = tuple(sorted(kept))
    best_w = weight(best_idx)

    def shrink_to_iis(witness):
        core = list(witness)
        changed = True
        while changed:
            changed = False
            for cand in list(core):
                trial = tuple(i for i in core if i != cand)
                if not trial:
                    continue
                ok, _, _ = _feasible_subset(cons_le, dim, trial, box)
                if not ok:
                    core = list(trial)
                    changed = True
                    break
        return core

    visited = set()
    stack = [frozenset()]
    while stack:
        excluded = stack.pop()
        if excluded in visited:
            continue
        visited.add(excluded)
        active = tuple(i for i in range(n) if i not in excluded)
        aw = weight(active)
        # a node (and all its descendants) is useless once it cannot beat the
        # incumbent, counting the lexicographic tie-break
        if not active or aw < best_w or (aw == best_w and active >= best_idx):
            continue
        ok, _, witness = _feasible_subset(cons_le, dim, active, box)
        if ok:
            cand_w = weight(active)
            if cand_w > best_w or (cand_w == best_w and active < best_idx):
                best_w, best_idx = cand_w, active
            continue
        if not witness:
            witness = active
        iis = shrink_to_iis(witness)
        for member in sorted(iis):
            child = excluded | {member}
            if child not in visited:
                stack.append(child)

    _, point, _ = _feasible_subset(cons_le, dim, best_idx, box)
    return best_idx, point


def exhaustive_max_feasible(constraints: Sequence[HalfSpace],
                            weights: Sequence[float] | None = None,
                            box=BOX_BOUND, tol=TOL):
    """2^n oracle: best feasible-subsystem weight by brute enumeration.

    Feasibility of each subset is decided against the vertices of the full
    constraint/box arrangement (every nonempty boxed polyhedron exposes one),
    so the enumeration stays exact without 2^n LP solves.
    """
    constraints = list(constraints)
    n = len(constraints)
    dim = constraints[0].dim
    w = [1.0] * n if weights is None else [float(v) for v in weights]
    rows = [hs.as_le() for hs in constraints]
    planes = [(np.array(a, dtype=float), float(b)) for a, b in rows]
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = 1.0
        planes.append((e.copy(), box))
        planes.append((-e, box))
    a_mat = np.array([a for a, _ in rows], dtype=float)
    b_vec = np.array([b for _, b in rows], dtype=float)
    scale = np.maximum(1.0, np.abs(a_mat).max(axis=1))

    masks = set()
    for combo in itertools.combinations(range(len(planes)), dim):
        mat = np.array([planes[i][0] for i in combo])
        rhs = np.array([planes[i][1] for i in combo])
        try:
            x = np.linalg.solve(mat, rhs)
        except np.linalg.LinAlgError:
            continue
        if np.abs(x).max() > box * (1 + 1e-9):
            continue
        sat = a_mat @ x - b_vec <= tol * scale * max(1.0, np.abs(x).max())
        mask = 0
        for i in range(n):
            if sat[i]:
                mask |= 1 << i
        masks.add(mask)
    # keep only maximal masks
    maximal = [m for m in masks if not any(m != o and (m & o) == m for o in masks)]

    best_w = 0.0
    best_subset = ()
    for s in range(1 << n):
        if not any((mask & s) == s for mask in maximal):
            continue
        sw = sum(w[i] for i in range(n) if s >> i & 1)
        if sw > best_w:
            best_w = sw
            best_subset = tuple(i for i in range(n) if s >> i & 1)
    return best_w, best_subset


# --------------------------------------------------------------------------
# Tolerant Linear Feasibility Tester
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TolerantConfig:
    epsilon: float
    c: float = 1.0 / 20.0
    seed: int = 0
    max_subset_search_size: int = 25
    sample_multiplier: float = 10.0
    check_rounds: int | None = None

    def __post_init__(self):
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must be in (0, 1]")
        if not 0 < self.c < 1.0 / 15.0:
            raise ValueError("closeness constant c must lie in (0, 1/15)")


def run_tolerant_feasibility_tester(constraints: ConstraintSet,
                                    cfg: TolerantConfig) -> TesterVerdict:
    """Tolerant feasibility tester: solves the sample's exact MAX-FS first.

    Accepts (w.p. >= 2/3) systems where at most ``c * epsilon * n`` constraints
    must be dropped; rejects (w.p. >= 2/3) epsilon-far systems.  The MAX-FS
    step is exponential in the sample size, hence the search-size guard.
    """
    n = constraints.n
    if n == 0:
        raise EmptyInstanceError("no constraints")
    d = constraints.dim
    r = min(math.ceil(cfg.sample_multiplier * d / cfg.epsilon), n)
    if r > cfg.max_subset_search_size:
        raise TooLargeError(
            f"sample size {r} exceeds exact-search guard "
            f"{cfg.max_subset_search_size}")
    rng = np.random.default_rng(cfg.seed)
    sample = tuple(sorted(int(i) for i in rng.choice(n, size=r, replace=False)))
    reads = set(sample)
    rounds = math.ceil(2.0 / cfg.epsilon) if cfg.check_rounds is None \
        else cfg.check_rounds

    # weighted MAX-FS over the distinct constraints of the sample
    item_idx = constraints.distinct(sample)
    weights = [0] * len(item_idx)
    pos = {it: j for j, it in enumerate(item_idx)}
    for i in sample:
        weights[pos[constraints.item_index(i)]] += 1
    items = [constraints.items[i] for i in item_idx]
    subset, point = max_feasible_subset(items, guard=cfg.max_subset_search_size,
                                        weights=weights)
    if not subset or point is None:
        verdict = TesterVerdict(REJECT, len(reads), CAUSE_PHI_EXCEEDS_K, None, sample)
        assert verdict.queries_used <= r + rounds
        return verdict

    for _ in range(rounds):
        y = int(rng.integers(n))
        reads.add(y)
        if not constraints.item_at(y).satisfied_by(point):
            verdict = TesterVerdict(REJECT, len(reads), CAUSE_VIOLATOR_FOUND,
                                    y, sample)
            assert verdict.queries_used <= r + rounds
            return verdict
    verdict = TesterVerdict(ACCEPT, len(reads), CAUSE_NO_VIOLATION, None, sample)
    assert verdict.queries_used <= r + rounds
    return verdict
