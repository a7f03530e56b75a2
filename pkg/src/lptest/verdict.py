"""Tester verdicts, seeded trial derivation, and Monte Carlo aggregation."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

ACCEPT = "accept"
REJECT = "reject"

CAUSE_PHI_EXCEEDS_K = "phi_exceeds_k"
CAUSE_VIOLATOR_FOUND = "violator_found"
CAUSE_NO_VIOLATION = "no_violation"


@dataclass(frozen=True)
class TesterVerdict:
    decision: str
    queries_used: int
    cause: str
    witness_index: int | None = None
    r_sample: tuple[int, ...] = ()

    def __post_init__(self):
        if self.decision == REJECT:
            assert self.cause in (CAUSE_PHI_EXCEEDS_K, CAUSE_VIOLATOR_FOUND)

    @property
    def accepted(self) -> bool:
        return self.decision == ACCEPT


def derive_seed(seed: int, *parts: int) -> int:
    """Deterministic per-trial seed: hash of (seed, *parts) via SeedSequence."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFF, *[int(p) for p in parts]])
    return int(ss.generate_state(1)[0])


@dataclass(frozen=True)
class AcceptanceEstimate:
    accept_rate: float
    mean_queries: float
    ci95: float
    accept_count: int
    trials: int
    verdicts: tuple[TesterVerdict, ...] = field(repr=False, default=())


def estimate_runs(run_fn, trials: int, seed: int) -> AcceptanceEstimate:
    """Run ``run_fn(trial_seed) -> TesterVerdict`` over derived per-trial seeds.

    Aggregates are independent of execution order.  LPTEST_THREADS > 1 fans
    trials out to worker processes; ``run_fn`` must then be picklable.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    seeds = [derive_seed(seed, t) for t in range(trials)]
    workers = int(os.environ.get("LPTEST_THREADS", "1"))
    if workers > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            verdicts = list(pool.map(run_fn, seeds, chunksize=max(1, trials // workers)))
    else:
        verdicts = [run_fn(s) for s in seeds]
    accept_count = sum(1 for v in verdicts if v.accepted)
    rate = accept_count / trials
    mean_q = sum(v.queries_used for v in verdicts) / trials
    ci95 = 1.96 * math.sqrt(rate * (1.0 - rate) / trials)
    return AcceptanceEstimate(rate, mean_q, ci95, accept_count, trials, tuple(verdicts))
