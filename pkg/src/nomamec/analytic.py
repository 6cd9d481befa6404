"""Closed-form successful-computation probability.

Given the offloading time and ratios, each user's offloaded bits translate into
an SNR threshold; the probability that both uplink NOMA decodes succeed over
independent Rayleigh channels then has the product form implemented in
:func:`ps_given_thresholds`. Results below ~1e-300 underflow to 0.0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePlan, InfeasibleDeadline
from .model import ArrayLike, NetworkConfig, OffloadingPlan, time_feasible

_LN2 = math.log(2.0)
_MAX_EXP2 = 1023.0


@dataclass(frozen=True)
class RateThresholds:
    """SINR threshold of user A (``gamma1``) and SNR threshold of user B (``gamma2``)."""

    gamma1: float
    gamma2: float


def rate_threshold(bits: float, t1: float, bandwidth: float) -> float:
    """SNR needed to push ``bits`` through ``bandwidth`` Hz in ``t1`` seconds: 2^(bits/(t1 B)) - 1."""
    if bits == 0:
        return 0.0
    if t1 <= 0:
        raise DegeneratePlan(f"{bits!r} bits cannot be offloaded in t1={t1!r} s")
    exponent = bits / (t1 * bandwidth)
    if exponent > _MAX_EXP2:
        return math.inf
    return math.expm1(exponent * _LN2)


def thresholds(cfg: NetworkConfig, plan: OffloadingPlan) -> RateThresholds:
    return RateThresholds(
        gamma1=rate_threshold(plan.beta_a * cfg.task_bits, plan.t1, cfg.bandwidth),
        gamma2=rate_threshold(plan.beta_b * cfg.task_bits, plan.t1, cfg.bandwidth),
    )


def log_ps_given_thresholds(
    cfg: NetworkConfig, gamma1: float, gamma2: float, lam: ArrayLike, complement: ArrayLike = None
) -> ArrayLike:
    """Natural log of :func:`ps_given_thresholds`; finite far below the float underflow limit.

    ``complement`` is ``1 - lam`` supplied at full precision, which matters when
    the optimal split sits within a few ulps of 1.
    """
    la, lb, rho = cfg.loss_a, cfg.loss_b, cfg.rho
    lam = np.asarray(lam, dtype=float)
    mu = 1.0 - lam if complement is None else np.asarray(complement, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if gamma1 == 0:
            log_share = np.zeros_like(lam)
            tail_a = np.zeros_like(lam)
        else:
            log_share = -np.log1p(gamma1 * mu * la / (lb * lam))
            tail_a = gamma1 * la * (1.0 + gamma2) / (lam * rho)
        tail_b = np.zeros_like(lam) if gamma2 == 0 else lb * gamma2 / (mu * rho)
        out = log_share - tail_b - tail_a
    out = np.where(np.isnan(out), -np.inf, out)
    return out if out.ndim else float(out)


def ps_given_thresholds(
    cfg: NetworkConfig, gamma1: float, gamma2: float, lam: ArrayLike, complement: ArrayLike = None
) -> ArrayLike:
    """Decoding-success probability for fixed thresholds; broadcasts over ``lam``.

    The first factor is the probability that user A clears its SINR threshold
    against user B's interference; the exponential collects both users'
    noise-limited tails.
    """
    la, lb, rho = cfg.loss_a, cfg.loss_b, cfg.rho
    lam = np.asarray(lam, dtype=float)
    mu = 1.0 - lam if complement is None else np.asarray(complement, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if gamma1 == 0:
            share = np.ones_like(lam)
            tail_a = np.zeros_like(lam)
        else:
            share = lb * lam / (lb * lam + gamma1 * mu * la)
            tail_a = gamma1 * la * (1.0 + gamma2) / (lam * rho)
        tail_b = np.zeros_like(lam) if gamma2 == 0 else lb * gamma2 / (mu * rho)
        out = share * np.exp(-tail_b - tail_a)
    out = np.where(np.isnan(out), 0.0, out)
    return out if out.ndim else float(out)


def closed_form_ps(cfg: NetworkConfig, plan: OffloadingPlan) -> float:
    """Probability that both offloads decode and all computation meets the deadline."""
    thr = thresholds(cfg, plan)
    if not time_feasible(cfg, plan):
        return 0.0
    return ps_given_thresholds(cfg, thr.gamma1, thr.gamma2, plan.lam)


def gamma_star(cfg: NetworkConfig) -> float:
    """Common threshold of both users under the optimal time/ratio allocation.

    Zero when the tasks fit locally. Raises :class:`InfeasibleDeadline` when the
    balanced allocation leaves no offloading time.
    """
    if cfg.local_feasible:
        return 0.0
    n = cfg.ratio_n
    room = cfg.deadline * (2.0 + n) - 2.0 * cfg.local_time
    if room <= 0:
        raise InfeasibleDeadline(
            f"deadline {cfg.deadline!r} s leaves no offloading time (needs > {2 * cfg.local_time / (2 + n)!r} s)"
        )
    exponent = n * cfg.task_bits / (room * cfg.bandwidth)
    if exponent > _MAX_EXP2:
        return math.inf
    return math.expm1(exponent * _LN2)


def ps_at_optimum(cfg: NetworkConfig, lambda_star: float, complement: float = None) -> float:
    """Maximum success probability: both thresholds equal ``gamma_star`` and the split is ``lambda_star``.

    ``complement`` optionally gives ``1 - lambda_star`` at full precision.
    """
    if cfg.local_feasible:
        return 1.0
    if not 0.0 < lambda_star < 1.0:
        raise ValueError(f"lambda_star must lie in (0, 1), got {lambda_star!r}")
    g = gamma_star(cfg)
    return ps_given_thresholds(cfg, g, g, lambda_star, complement)
