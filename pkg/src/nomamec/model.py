"""Scenario parameters and the deterministic link/computation physics.

Everything here is a pure function of immutable inputs. Channel gains may be
floats or numpy arrays; the link formulas broadcast over them so the Monte
Carlo estimator can evaluate millions of draws at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .errors import ConfigError

ArrayLike = Union[float, np.ndarray]

# Relative slack for the time comparisons. Balanced allocations make the three
# execution times equal to the phase length analytically; floats can miss by ulps.
# Local times are (1 - beta) * M C / f_user, so their rounding error scales with
# M C / f_user rather than with the (possibly much shorter) execution phase.
TIME_RTOL = 1e-12


@dataclass(frozen=True)
class NetworkConfig:
    """Static two-user scenario, SI units throughout.

    ``ratio_n`` is the server-to-user CPU speed ratio, so the server runs at
    ``ratio_n * f_user``. Both users carry tasks of ``task_bits`` bits.
    """

    d_a: float = 5.0
    d_b: float = 25.0
    alpha: float = 4.0
    p_total: float = 10.0
    sigma2: float = 1e-9
    bandwidth: float = 1e6
    f_user: float = 0.5e9
    ratio_n: float = 5.0
    cycles_per_bit: float = 1000.0
    task_bits: float = 1e4
    deadline: float = 10e-3

    def __post_init__(self):
        for name in ("d_a", "d_b", "alpha", "p_total", "sigma2", "bandwidth", "f_user", "deadline"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be a positive finite number, got {value!r}")
        if not self.ratio_n > 1:
            raise ConfigError(f"ratio_n must exceed 1, got {self.ratio_n!r}")
        if not self.cycles_per_bit >= 1:
            raise ConfigError(f"cycles_per_bit must be >= 1, got {self.cycles_per_bit!r}")
        if not self.task_bits >= 1:
            raise ConfigError(f"task_bits must be >= 1, got {self.task_bits!r}")

    @property
    def rho(self) -> float:
        """Transmit SNR P / sigma^2."""
        return self.p_total / self.sigma2

    @property
    def loss_a(self) -> float:
        """Large-scale attenuation factor 1 + d_a^alpha of user A."""
        return 1.0 + self.d_a**self.alpha

    @property
    def loss_b(self) -> float:
        return 1.0 + self.d_b**self.alpha

    @property
    def f_mec(self) -> float:
        return self.ratio_n * self.f_user

    @property
    def task_cycles(self) -> float:
        """CPU cycles of one full task, M * C."""
        return self.task_bits * self.cycles_per_bit

    @property
    def local_time(self) -> float:
        """Time to execute one whole task on a user CPU, M * C / f_user."""
        return self.task_cycles / self.f_user

    @property
    def local_feasible(self) -> bool:
        return self.local_time <= self.deadline

    def with_rho(self, rho: float) -> "NetworkConfig":
        """Same scenario with ``p_total`` rescaled so that P / sigma^2 == rho."""
        return replace(self, p_total=rho * self.sigma2)

    def replace(self, **changes) -> "NetworkConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class OffloadingPlan:
    """Decision variables: phase lengths, offloading ratios, power split.

    User A transmits with ``lam * P`` and user B with ``(1 - lam) * P``.
    ``lam`` is irrelevant when nothing is offloaded (``t1 == 0``).
    """

    t1: float
    t2: float
    beta_a: float
    beta_b: float
    lam: float = 0.5

    def __post_init__(self):
        for name in ("beta_a", "beta_b"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {value!r}")
        if not (self.t1 >= 0 and self.t2 >= 0 and math.isfinite(self.t1) and math.isfinite(self.t2)):
            raise ConfigError(f"phase lengths must be finite and >= 0, got t1={self.t1!r}, t2={self.t2!r}")
        if self.t1 > 0 and not 0.0 < self.lam < 1.0:
            raise ConfigError(f"lam must lie in (0, 1) when t1 > 0, got {self.lam!r}")
        if not 0.0 <= self.lam <= 1.0:
            raise ConfigError(f"lam must lie in [0, 1], got {self.lam!r}")

    @property
    def latency(self) -> float:
        return self.t1 + self.t2

    def replace(self, **changes) -> "OffloadingPlan":
        return replace(self, **changes)


@dataclass(frozen=True)
class ChannelRealization:
    """Small-scale power gains |h_A|^2 and |h_B|^2 (scalars or equal-shape arrays)."""

    g_a: ArrayLike
    g_b: ArrayLike

    def __post_init__(self):
        if np.any(np.asarray(self.g_a) < 0) or np.any(np.asarray(self.g_b) < 0):
            raise ConfigError("channel gains must be nonnegative")


def sinr_user_a(cfg: NetworkConfig, plan: OffloadingPlan, ch: ChannelRealization) -> ArrayLike:
    """SINR of user A, decoded first while user B's signal is still interference."""
    rho, lam = cfg.rho, plan.lam
    la, lb = cfg.loss_a, cfg.loss_b
    return (lb * lam * rho * ch.g_a) / ((1.0 - lam) * la * rho * ch.g_b + la * lb)


def snr_user_b(cfg: NetworkConfig, plan: OffloadingPlan, ch: ChannelRealization) -> ArrayLike:
    """SNR of user B after user A's signal has been cancelled."""
    return (1.0 - plan.lam) * cfg.rho * ch.g_b / cfg.loss_b


def achievable_bits(t1: float, bandwidth: float, gamma: ArrayLike) -> ArrayLike:
    """Bits deliverable in ``t1`` seconds over ``bandwidth`` Hz at SNR ``gamma``."""
    return t1 * bandwidth * np.log2(1.0 + gamma)


def execution_times(cfg: NetworkConfig, plan: OffloadingPlan) -> tuple[float, float, float]:
    """Return ``(t2_a, t2_b, t2_mec)``: local execution times and the server's time."""
    mc = cfg.task_cycles
    t2_a = (1.0 - plan.beta_a) * mc / cfg.f_user
    t2_b = (1.0 - plan.beta_b) * mc / cfg.f_user
    offloaded_bits = (plan.beta_a + plan.beta_b) * cfg.task_bits
    t2_mec = offloaded_bits * cfg.cycles_per_bit / cfg.f_mec
    return t2_a, t2_b, t2_mec


def _leq(x: float, bound: float, scale: float) -> bool:
    return x <= bound + TIME_RTOL * scale


def time_feasible(cfg: NetworkConfig, plan: OffloadingPlan) -> bool:
    """True iff every computation finishes within ``t2`` and ``t1 + t2`` fits the deadline."""
    return _leq(max(execution_times(cfg, plan)), plan.t2, max(plan.t2, cfg.local_time)) and _leq(
        plan.t1 + plan.t2, cfg.deadline, cfg.deadline
    )
