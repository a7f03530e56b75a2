"""The generic property tester for LP-type optimization instances.

Samples ``ceil(10 delta / epsilon)`` constraints, solves the sampled
subproblem, rejects if its objective already exceeds the threshold, and
otherwise spot-checks the certificate against ``ceil(2 / epsilon)``
constraints drawn uniformly outside the sample.  Query accounting counts
every distinct constraint read; runs are byte-for-byte reproducible from
(instance, config, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import partial

import numpy as np

from .constraints import TOL, Kind, ProblemInstance
from .core import item_violates, phi
from .errors import EmptyInstanceError
from .verdict import (
    ACCEPT,
    CAUSE_NO_VIOLATION,
    CAUSE_PHI_EXCEEDS_K,
    CAUSE_VIOLATOR_FOUND,
    REJECT,
    AcceptanceEstimate,
    TesterVerdict,
    estimate_runs,
)

_OPTIMIZATION_KINDS = (Kind.MEB, Kind.INTERSECTING_BALL, Kind.ANNULUS)


@dataclass(frozen=True)
class TesterConfig:
    epsilon: float
    k: float | None = None  # None: use the instance's threshold
    seed: int = 0
    sample_multiplier: float = 10.0
    check_rounds: int | None = None  # None: ceil(2 / epsilon)

    def __post_init__(self):
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must be in (0, 1]")
        if self.sample_multiplier < 1:
            raise ValueError("sample_multiplier must be >= 1")
        if self.check_rounds is not None and self.check_rounds < 1:
            raise ValueError("check_rounds must be >= 1")

    def sample_size(self, delta: int, n: int) -> int:
        return min(math.ceil(self.sample_multiplier * delta / self.epsilon), n)

    def rounds(self) -> int:
        if self.check_rounds is not None:
            return self.check_rounds
        return math.ceil(2.0 / self.epsilon)


def run_lptype_tester(instance: ProblemInstance, cfg: TesterConfig,
                      rng=None) -> TesterVerdict:
    """One tester run; accept/reject with full query accounting.

    When the sample covers the whole instance the check loop is skipped and
    the verdict is the exact threshold decision.
    """
    if instance.kind not in _OPTIMIZATION_KINDS:
        raise ValueError(
            f"{instance.kind.value} has no threshold objective; use the "
            "feasibility tester instead")
    n = instance.n
    if n == 0:
        raise EmptyInstanceError("no constraints")
    k = cfg.k if cfg.k is not None else instance.k
    if k is None:
        raise ValueError("no threshold k on the config or the instance")
    rng = np.random.default_rng(cfg.seed) if rng is None else rng

    r = cfg.sample_size(instance.delta, n)
    rounds = cfg.rounds()
    budget = r + rounds
    sample = tuple(sorted(int(i) for i in rng.choice(n, size=r, replace=False)))
    reads = set(sample)

    value = phi(instance, sample)
    if value.value > k + TOL:
        verdict = TesterVerdict(REJECT, len(reads), CAUSE_PHI_EXCEEDS_K, None, sample)
        assert verdict.queries_used <= budget
        return verdict
    if r >= n:
        # R = S: the decision is exact, nothing left to check
        return TesterVerdict(ACCEPT, len(reads), CAUSE_NO_VIOLATION, None, sample)

    complement = np.setdiff1d(np.arange(n), np.array(sample, dtype=int))
    cset = instance.constraints
    for _ in range(rounds):
        x = int(complement[rng.integers(len(complement))])
        reads.add(x)
        if item_violates(instance.kind, value, cset.item_at(x)):
            verdict = TesterVerdict(REJECT, len(reads), CAUSE_VIOLATOR_FOUND,
                                    x, sample)
            assert verdict.queries_used <= budget
            return verdict
    verdict = TesterVerdict(ACCEPT, len(reads), CAUSE_NO_VIOLATION, None, sample)
    assert verdict.queries_used <= budget
    return verdict


def _trial(instance: ProblemInstance, cfg: TesterConfig, trial_seed: int):
    return run_lptype_tester(instance, replace(cfg, seed=trial_seed))


def estimate_verdict_probability(instance: ProblemInstance, cfg: TesterConfig,
                                 trials: int, seed: int) -> AcceptanceEstimate:
    """Monte Carlo acceptance estimate over per-trial derived seeds.

    The aggregate is independent of execution order; trials may run in
    parallel worker processes (LPTEST_THREADS).
    """
    return estimate_runs(partial(_trial, instance, cfg), trials, seed)
