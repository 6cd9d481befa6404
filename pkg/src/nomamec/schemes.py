"""Baseline offloading schemes compared against the optimal one.

``CompleteOffloadOma`` is a TDMA counterpart: after the server finishes the
fully offloaded tasks, the remaining time ``t1`` is split into two equal
exclusive slots and each user transmits alone at the full power ``P``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from .analytic import closed_form_ps, rate_threshold, thresholds
from .errors import ConfigError, InfeasibleDeadline
from .model import NetworkConfig, OffloadingPlan, achievable_bits, execution_times, time_feasible
from .montecarlo import PsEstimate, Seed, estimate_event, estimate_ps
from .optimizer import (
    GRID_STEP,
    LOCAL_LAMBDA,
    grid_lambda,
    optimal_plan,
    theorem2_lambda,
)


class SchemeKind(str, Enum):
    PROPOSED = "proposed"
    FULL_LOCAL = "full_local"
    COMPLETE_OFFLOAD_NOMA = "complete_offload_noma"
    FIXED_OFFLOAD_NOMA = "fixed_offload_noma"
    COMPLETE_OFFLOAD_OMA = "complete_offload_oma"


@dataclass(frozen=True)
class SchemeSpec:
    """A scheme and its power-split policy; ``lam=None`` means optimized."""

    kind: SchemeKind
    beta: Optional[float] = None
    lam: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SchemeKind(self.kind))
        if self.kind is SchemeKind.FIXED_OFFLOAD_NOMA:
            if self.beta is None or not 0 < self.beta <= 1:
                raise ConfigError(f"fixed offloading ratio must lie in (0, 1], got {self.beta!r}")
        elif self.beta is not None:
            raise ConfigError(f"{self.kind.value} takes no offloading ratio")
        if self.lam is not None and not 0 < self.lam < 1:
            raise ConfigError(f"fixed power split must lie in (0, 1), got {self.lam!r}")

    @property
    def label(self) -> str:
        name = self.kind.value
        if self.beta is not None:
            name += f"_{self.beta:g}"
        if self.lam is not None:
            name += f"@lam={self.lam:g}"
        return name

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if self.beta is not None:
            out["beta"] = self.beta
        if self.lam is not None:
            out["lambda"] = self.lam
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SchemeSpec":
        unknown = set(data) - {"kind", "beta", "lambda"}
        if unknown:
            raise ConfigError(f"unknown scheme keys: {sorted(unknown)}")
        if "kind" not in data:
            raise ConfigError("scheme entry needs a 'kind'")
        try:
            kind = SchemeKind(data["kind"])
        except ValueError:
            raise ConfigError(
                f"unknown scheme kind {data['kind']!r}; choose from {[k.value for k in SchemeKind]}"
            ) from None
        return cls(kind, data.get("beta"), data.get("lambda"))


PROPOSED = SchemeSpec(SchemeKind.PROPOSED)
FULL_LOCAL = SchemeSpec(SchemeKind.FULL_LOCAL)
COMPLETE_OFFLOAD_NOMA = SchemeSpec(SchemeKind.COMPLETE_OFFLOAD_NOMA)
COMPLETE_OFFLOAD_OMA = SchemeSpec(SchemeKind.COMPLETE_OFFLOAD_OMA)


def fixed_offload(beta: float, lam: Optional[float] = None) -> SchemeSpec:
    return SchemeSpec(SchemeKind.FIXED_OFFLOAD_NOMA, beta, lam)


@dataclass(frozen=True)
class MonteCarlo:
    n: int
    seed: Seed
    workers: int = 1


def _offload_plan(cfg: NetworkConfig, beta: float, lam: Optional[float]) -> OffloadingPlan:
    probe = OffloadingPlan(0.0, 0.0, beta, beta)
    t2 = max(execution_times(cfg, probe))
    t1 = cfg.deadline - t2
    if t1 <= 0:
        raise InfeasibleDeadline(f"offloading ratio {beta!r} leaves no offloading time (t2={t2!r} s)")
    plan = OffloadingPlan(t1, t2, beta, beta, LOCAL_LAMBDA if lam is None else lam)
    if lam is None:
        lam_grid, _ = grid_lambda(cfg, thresholds(cfg, plan), GRID_STEP)
        plan = plan.replace(lam=lam_grid)
    return plan


def _proposed_plan(cfg: NetworkConfig, lam: Optional[float], pin_t1: Optional[float]) -> OffloadingPlan:
    if pin_t1 is None:
        plan, _ = optimal_plan(cfg)
        if lam is not None:
            plan = plan.replace(lam=lam)
        return plan
    # ratios and execution phase from the optimal allocation, offloading time held fixed
    n = cfg.ratio_n
    t2 = 2 * cfg.local_time / (n + 2)
    beta = n / (n + 2)
    if pin_t1 <= 0:
        raise InfeasibleDeadline(f"pinned offloading time must be positive, got {pin_t1!r}")
    plan = OffloadingPlan(pin_t1, t2, beta, beta, LOCAL_LAMBDA if lam is None else lam)
    if lam is None:
        plan = plan.replace(lam=theorem2_lambda(cfg, thresholds(cfg, plan)).lambda_star)
    return plan


def scheme_plan(cfg: NetworkConfig, spec: SchemeSpec, pin_t1: Optional[float] = None) -> OffloadingPlan:
    """Offloading plan a scheme would run in scenario ``cfg``.

    ``pin_t1`` (proposed scheme only) fixes the offloading time while keeping
    the optimal ratios and execution phase, which is how the latency/frequency
    trade-off is explored.
    """
    kind = spec.kind
    if pin_t1 is not None and kind is not SchemeKind.PROPOSED:
        raise ConfigError("pinning t1 only applies to the proposed scheme")
    if kind is SchemeKind.PROPOSED:
        return _proposed_plan(cfg, spec.lam, pin_t1)
    if kind is SchemeKind.FULL_LOCAL:
        return OffloadingPlan(0.0, min(cfg.deadline, cfg.local_time), 0.0, 0.0, spec.lam or LOCAL_LAMBDA)
    if kind is SchemeKind.COMPLETE_OFFLOAD_NOMA:
        return _offload_plan(cfg, 1.0, spec.lam)
    if kind is SchemeKind.FIXED_OFFLOAD_NOMA:
        return _offload_plan(cfg, spec.beta, spec.lam)
    # OMA: the power split is meaningless, each user owns half of t1 at full power
    return _offload_plan(cfg, 1.0, LOCAL_LAMBDA)


def oma_ps(cfg: NetworkConfig, plan: OffloadingPlan) -> float:
    """Closed form for the TDMA scheme: product of the two users' Rayleigh tails."""
    if not time_feasible(cfg, plan):
        return 0.0
    slot = plan.t1 / 2
    g_a = rate_threshold(plan.beta_a * cfg.task_bits, slot, cfg.bandwidth)
    g_b = rate_threshold(plan.beta_b * cfg.task_bits, slot, cfg.bandwidth)
    return math.exp(-cfg.loss_a * g_a / cfg.rho) * math.exp(-cfg.loss_b * g_b / cfg.rho)


def oma_success_event(cfg: NetworkConfig, plan: OffloadingPlan):
    slot = plan.t1 / 2
    on_time = time_feasible(cfg, plan)

    def event(g_a: np.ndarray, g_b: np.ndarray) -> np.ndarray:
        if not on_time:
            return np.zeros(np.shape(g_a), dtype=bool)
        ok_a = achievable_bits(slot, cfg.bandwidth, cfg.rho * g_a / cfg.loss_a) >= plan.beta_a * cfg.task_bits
        ok_b = achievable_bits(slot, cfg.bandwidth, cfg.rho * g_b / cfg.loss_b) >= plan.beta_b * cfg.task_bits
        return ok_a & ok_b

    return event


def plan_ps(
    cfg: NetworkConfig, spec: SchemeSpec, plan: OffloadingPlan, method: Optional[MonteCarlo] = None
) -> Union[float, PsEstimate]:
    """Success probability of an already-built plan under the scheme's access method."""
    oma = spec.kind is SchemeKind.COMPLETE_OFFLOAD_OMA
    if method is None:
        return oma_ps(cfg, plan) if oma else closed_form_ps(cfg, plan)
    if oma:
        return estimate_event(oma_success_event(cfg, plan), method.n, method.seed, method.workers)
    return estimate_ps(cfg, plan, method.n, method.seed, method.workers)


def scheme_ps(
    cfg: NetworkConfig, spec: SchemeSpec, method: Optional[MonteCarlo] = None
) -> Union[float, PsEstimate]:
    """Analytic probability (``method=None``) or a Monte Carlo estimate for a scheme."""
    return plan_ps(cfg, spec, scheme_plan(cfg, spec), method)
