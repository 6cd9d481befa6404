"""Monte Carlo estimate of the success probability straight from its definition.

Each draw samples both Rayleigh power gains, computes the achievable bits of the
SIC receiver (user A decoded first against user B's interference, then user B
interference-free) and checks the joint success event together with the
execution-time constraint. Nothing from the closed-form derivation is reused,
so the estimate is an independent check of it.

Streams come from the counter-based Philox generator. A seed is split into
``workers`` child streams with ``SeedSequence.spawn``, worker ``k`` handles a
fixed contiguous share of the draws, and the reduction sums integer counts, so
results are reproducible for a fixed ``(seed, workers)`` pair.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .analytic import thresholds
from .model import (
    ChannelRealization,
    NetworkConfig,
    OffloadingPlan,
    achievable_bits,
    sinr_user_a,
    snr_user_b,
    time_feasible,
)

Seed = Union[int, Sequence[int]]
# (g_a, g_b) arrays -> boolean success array
SuccessEvent = Callable[[np.ndarray, np.ndarray], np.ndarray]

CHUNK = 1 << 20


@dataclass(frozen=True)
class PsEstimate:
    p_hat: float
    n: int
    stderr: float
    seed: Seed
    workers: int = 1
    successes: int = 0


def make_rng(seed: Seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def worker_streams(seed: Seed, workers: int) -> list[np.random.Generator]:
    """Independent child generators, one per worker."""
    children = np.random.SeedSequence(seed).spawn(workers)
    return [np.random.Generator(np.random.Philox(child)) for child in children]


def _exp1(rng: np.random.Generator, size) -> np.ndarray:
    # -ln(U) with U uniform on (0, 1]
    return -np.log1p(-rng.random(size))


def sample_gains(rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
    """``size`` independent Exp(1) draws of |h_A|^2 and |h_B|^2."""
    return _exp1(rng, size), _exp1(rng, size)


def sample_channel(rng: np.random.Generator) -> ChannelRealization:
    g_a, g_b = sample_gains(rng, 1)
    return ChannelRealization(float(g_a[0]), float(g_b[0]))


def _count(event: SuccessEvent, rng: np.random.Generator, n: int, chunk: int) -> int:
    hits = 0
    left = n
    while left > 0:
        size = min(chunk, left)
        g_a, g_b = sample_gains(rng, size)
        hits += int(np.count_nonzero(event(g_a, g_b)))
        left -= size
    return hits


def estimate_event(
    event: SuccessEvent, n: int, seed: Seed, workers: int = 1, chunk: int = CHUNK
) -> PsEstimate:
    """Fraction of ``n`` channel draws on which ``event`` holds."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers!r}")
    shares = [n // workers + (k < n % workers) for k in range(workers)]
    streams = worker_streams(seed, workers)
    if workers == 1:
        counts = [_count(event, streams[0], n, chunk)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda rs: _count(event, rs[0], rs[1], chunk), zip(streams, shares)))
    hits = sum(counts)
    p_hat = hits / n
    return PsEstimate(p_hat, n, math.sqrt(p_hat * (1 - p_hat) / n), seed, workers, hits)


def noma_success_event(cfg: NetworkConfig, plan: OffloadingPlan) -> SuccessEvent:
    need_a = plan.beta_a * cfg.task_bits
    need_b = plan.beta_b * cfg.task_bits
    on_time = time_feasible(cfg, plan)

    def event(g_a: np.ndarray, g_b: np.ndarray) -> np.ndarray:
        if not on_time:
            return np.zeros(np.shape(g_a), dtype=bool)
        ch = ChannelRealization(g_a, g_b)
        with np.errstate(divide="ignore", invalid="ignore"):
            ok_a = achievable_bits(plan.t1, cfg.bandwidth, sinr_user_a(cfg, plan, ch)) >= need_a
            ok_b = achievable_bits(plan.t1, cfg.bandwidth, snr_user_b(cfg, plan, ch)) >= need_b
        return ok_a & ok_b

    return event


def estimate_ps(
    cfg: NetworkConfig, plan: OffloadingPlan, n: int, seed: Seed, workers: int = 1
) -> PsEstimate:
    """Monte Carlo success probability of ``plan``; deterministic in ``(seed, workers)``."""
    thresholds(cfg, plan)  # rejects nonzero offload with t1 == 0
    return estimate_event(noma_success_event(cfg, plan), n, seed, workers)
