"""Reductions from labeled-point separability to linear feasibility.

Two-label sets reduce to the margin system ``p.x >= 1`` / ``p.x <= -1``;
arbitrary finite-basis function families reduce through monomial feature
maps; multi-label sets run the pairwise reduction with majority-vote
amplification.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .constraints import ConstraintSet, HalfSpace, LabeledPoint
from .errors import BadLabelError, BadSpecError
from .linprog import run_linear_feasibility_tester
from .verdict import derive_seed


@dataclass(frozen=True)
class LabeledPointSet:
    points: tuple[tuple[float, ...], ...]
    labels: tuple[int, ...]
    multiplicities: tuple[int, ...]

    def __post_init__(self):
        if not (len(self.points) == len(self.labels) == len(self.multiplicities)):
            raise BadSpecError("points, labels and multiplicities must align")
        if any(m < 1 for m in self.multiplicities):
            raise BadSpecError("multiplicities must be >= 1")

    @classmethod
    def of(cls, points, labels, multiplicities=None):
        points = tuple(tuple(float(c) for c in p) for p in points)
        labels = tuple(int(v) for v in labels)
        if multiplicities is None:
            multiplicities = tuple(1 for _ in points)
        return cls(points, labels, tuple(int(m) for m in multiplicities))

    @property
    def dim(self) -> int:
        return len(self.points[0])

    @property
    def n(self) -> int:
        return sum(self.multiplicities)

    @property
    def label_values(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.labels)))

    def restrict(self, keep_labels) -> "LabeledPointSet":
        keep = set(keep_labels)
        sel = [i for i, lab in enumerate(self.labels) if lab in keep]
        if not sel:
            raise BadSpecError(f"no points with labels {sorted(keep)}")
        return LabeledPointSet(
            tuple(self.points[i] for i in sel),
            tuple(self.labels[i] for i in sel),
            tuple(self.multiplicities[i] for i in sel))

    def relabel(self, mapping) -> "LabeledPointSet":
        return LabeledPointSet(
            self.points, tuple(mapping[lab] for lab in self.labels),
            self.multiplicities)

    def as_constraint_set(self) -> ConstraintSet:
        items = tuple(LabeledPoint(p, lab) for p, lab in zip(self.points, self.labels))
        return ConstraintSet(items, self.multiplicities, self.dim)


def reduce_to_constraints(pts: LabeledPointSet) -> ConstraintSet:
    """Margin system for homogeneous separation of a two-label point set.

    A +1 point p contributes ``p.x >= 1``; a -1 point ``p.x <= -1``.  The
    system is feasible exactly when a homogeneous separator with unit margin
    exists, which for finite sets coincides with strict separability.
    """
    bad = set(pts.labels) - {1, -1}
    if bad:
        raise BadLabelError(f"two-label reduction needs labels in {{+1,-1}}, "
                            f"found {sorted(bad)}")
    items = []
    for p, lab in zip(pts.points, pts.labels):
        if not any(v != 0.0 for v in p):
            raise BadSpecError(
                "the origin cannot sit strictly on either side of a "
                "homogeneous separator; lift (e.g. degree 1) before reducing")
        if lab == 1:
            items.append(HalfSpace(p, 1.0, "ge"))
        else:
            items.append(HalfSpace(p, -1.0, "le"))
    return ConstraintSet(tuple(items), pts.multiplicities, pts.dim)


@dataclass(frozen=True)
class FeatureMap:
    """Monomial basis of total degree <= t over d variables."""

    basis_functions: tuple[tuple[int, ...], ...]
    degree: int

    def __post_init__(self):
        if len(set(self.basis_functions)) != len(self.basis_functions):
            raise BadSpecError("monomial descriptors must be pairwise distinct")
        d = len(self.basis_functions[0])
        if len(self.basis_functions) != math.comb(self.degree + d, d):
            raise BadSpecError("basis size must equal C(t+d, d)")

    @classmethod
    def polynomial(cls, d: int, t: int) -> "FeatureMap":
        if t < 1:
            raise BadSpecError("degree t must be >= 1")
        exps = []
        for total in range(t + 1):
            block = [e for e in itertools.product(range(total + 1), repeat=d)
                     if sum(e) == total]
            block.sort(reverse=True)
            exps.extend(block)
        return cls(tuple(exps), t)

    @property
    def k(self) -> int:
        return len(self.basis_functions)

    def evaluate(self, p) -> tuple[float, ...]:
        out = []
        for exps in self.basis_functions:
            v = 1.0
            for c, e in zip(p, exps):
                v *= c ** e
            if abs(v) > 1e12:
                raise OverflowError(
                    "feature value exceeds 1e12; normalize coordinates first")
            out.append(v)
        return tuple(out)


def lift(pts: LabeledPointSet, fm: FeatureMap) -> LabeledPointSet:
    """Map points through the feature basis, preserving labels and weights.

    Composing with ``reduce_to_constraints`` yields the polynomial-separability
    feasibility system in k = C(t+d, d) variables.  Degree 1 is the affine
    lift (leading constant-1 coordinate = bias term).
    """
    lifted = tuple(fm.evaluate(p) for p in pts.points)
    return LabeledPointSet(lifted, pts.labels, pts.multiplicities)


def affine_lift(pts: LabeledPointSet) -> LabeledPointSet:
    return lift(pts, FeatureMap.polynomial(pts.dim, 1))


# --------------------------------------------------------------------------
# Multi-label orchestration
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MultiLabelVerdict:
    decision: str  # accept / reject
    queries_used: int
    rejected_pair: tuple[int, int] | None
    pair_accept_counts: tuple[tuple[tuple[int, int], int], ...]
    repetitions: int

    @property
    def accepted(self) -> bool:
        return self.decision == "accept"


def multilabel_run_seed(seed: int, pair_index: int, rep: int) -> int:
    return derive_seed(seed, pair_index, rep)


def run_multilabel_tester(pts: LabeledPointSet, epsilon: float, seed: int = 0,
                          repetition_constant: int = 108,
                          repetitions: int | None = None) -> MultiLabelVerdict:
    """Pairwise separability tester for ell >= 2 labels.

    Each of the C(ell, 2) label pairs runs the two-label feasibility tester at
    epsilon' = epsilon / C(ell, 2), repeated ``108 * ceil(ln ell)`` times with
    a per-pair majority vote; the verdict is accept iff every pair accepts.
    The repetition constant and count are overridable for experiments.
    """
    labels = pts.label_values
    ell = len(labels)
    if ell < 2:
        raise BadLabelError("need at least 2 distinct labels")
    num_pairs = math.comb(ell, 2)
    eps_pair = epsilon / num_pairs
    if repetitions is None:
        repetitions = repetition_constant * max(1, math.ceil(math.log(ell)))

    total_queries = 0
    pair_counts = []
    rejected_pair = None
    for pair_index, (la, lb) in enumerate(itertools.combinations(labels, 2)):
        sub = pts.restrict((la, lb)).relabel({la: 1, lb: -1})
        system = reduce_to_constraints(sub)
        accepts = 0
        for rep in range(repetitions):
            v = run_linear_feasibility_tester(
                system, eps_pair, seed=multilabel_run_seed(seed, pair_index, rep))
            total_queries += v.queries_used
            if v.accepted:
                accepts += 1
        pair_counts.append(((la, lb), accepts))
        if rejected_pair is None and 2 * accepts <= repetitions:
            rejected_pair = (la, lb)
    decision = "accept" if rejected_pair is None else "reject"
    return MultiLabelVerdict(decision, total_queries, rejected_pair,
                             tuple(pair_counts), repetitions)


def multilabel_query_ceiling(d: int, ell: int, epsilon: float,
                             repetition_constant: int = 108) -> int:
    """Worst-case query budget of the multi-label tester."""
    num_pairs = math.comb(ell, 2)
    eps_pair = epsilon / num_pairs
    reps = repetition_constant * max(1, math.ceil(math.log(ell)))
    per_run = math.ceil(10.0 * d / eps_pair) + math.ceil(2.0 / eps_pair)
    return num_pairs * reps * per_run
