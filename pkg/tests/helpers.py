"""Shared generators for property and acceptance tests."""
from __future__ import annotations

import math

import numpy as np
from hypothesis import strategies as st

from nomamec.model import NetworkConfig, OffloadingPlan, execution_times

DEFAULT = NetworkConfig()


def offload_task_range(ratio_n: float, cfg: NetworkConfig = DEFAULT) -> tuple[float, float]:
    """Task sizes that cannot finish locally yet leave the balanced allocation some offloading time."""
    lo = cfg.deadline * cfg.f_user / cfg.cycles_per_bit
    hi = 0.95 * cfg.deadline * cfg.f_user * (ratio_n + 2) / (2 * cfg.cycles_per_bit)
    return lo * 1.0001, hi


def random_offload_config(rng: np.random.Generator, vary_task: bool = False) -> NetworkConfig:
    """Distances in [1, 50] m, alpha in [2, 4], rho in [1e6, 1e12]; optionally random N and M too."""
    changes = dict(d_a=rng.uniform(1, 50), d_b=rng.uniform(1, 50), alpha=rng.uniform(2, 4))
    if vary_task:
        n = float(rng.integers(2, 11))
        lo, hi = offload_task_range(n)
        changes.update(ratio_n=n, task_bits=rng.uniform(lo, hi))
    return DEFAULT.replace(**changes).with_rho(10 ** rng.uniform(6, 12))


def random_feasible_plan(cfg: NetworkConfig, rng: np.random.Generator, slack: float = 0.2) -> OffloadingPlan:
    """Uniform ratios and split; t2 at or above the slowest execution time; t1 anywhere in what is left."""
    while True:
        beta_a, beta_b = rng.uniform(0, 1, 2)
        t2 = max(execution_times(cfg, OffloadingPlan(0.0, 0.0, beta_a, beta_b))) * (1 + slack * rng.uniform())
        room = cfg.deadline - t2
        if room > 0:
            t1 = room * rng.uniform(0.01, 1.0)
            return OffloadingPlan(t1, t2, beta_a, beta_b, rng.uniform(0.01, 0.99))


@st.composite
def offload_configs(draw, vary_task: bool = True) -> NetworkConfig:
    changes = dict(
        d_a=draw(st.floats(1, 50)),
        d_b=draw(st.floats(1, 50)),
        alpha=draw(st.floats(2, 4)),
    )
    if vary_task:
        n = draw(st.integers(2, 10))
        lo, hi = offload_task_range(n)
        changes.update(ratio_n=float(n), task_bits=draw(st.floats(lo, hi)))
    return DEFAULT.replace(**changes).with_rho(10 ** draw(st.floats(6, 12)))


@st.composite
def configs_and_plans(draw):
    """A scenario that must offload, plus a time-feasible plan for it."""
    cfg = draw(offload_configs())
    seed = draw(st.integers(0, 2**32 - 1))
    return cfg, random_feasible_plan(cfg, np.random.default_rng(seed))


def local_configs() -> st.SearchStrategy[NetworkConfig]:
    """Scenarios whose tasks finish locally within the deadline."""

    @st.composite
    def build(draw):
        f_user = draw(st.floats(1e8, 5e9))
        deadline = draw(st.floats(1e-3, 0.1))
        cycles = draw(st.floats(1, 5000))
        task_max = deadline * f_user / cycles
        if task_max < 1:
            cycles = 1.0
            task_max = deadline * f_user
        task = draw(st.floats(1, task_max))
        return DEFAULT.replace(f_user=f_user, deadline=deadline, cycles_per_bit=cycles, task_bits=task)

    return build().filter(lambda c: c.local_feasible)


def ulp_close(x: float, y: float, ulps: int = 4) -> bool:
    return abs(x - y) <= ulps * math.ulp(max(abs(x), abs(y)))
