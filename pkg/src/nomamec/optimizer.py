"""Optimal time/ratio allocation and optimal power split.

The time and ratio allocation balances the three execution times and spends
all remaining time offloading. The power split solves the stationarity
condition of the success probability in ``lam``, which reduces to the cubic

    m1 lam^3 + m2 lam^2 + m3 lam + a1 a3 = 0

with exactly one root in (0, 1). The roots are computed in closed form
(Nickalls' formulation); :func:`bisection_lambda` and :func:`grid_lambda`
serve as independent fallbacks/oracles.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import optimize

from .analytic import RateThresholds, log_ps_given_thresholds, ps_at_optimum, thresholds
from .errors import (
    BracketFailure,
    InfeasibleDeadline,
    LocalComputationSuffices,
    NoRootInUnitInterval,
    SolverDegenerate,
)
from .model import TIME_RTOL, NetworkConfig, OffloadingPlan, execution_times

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-9
BISECTION_TOL = 1e-12
GRID_STEP = 1e-4
CUBIC_EPS = 1e-12
DOUBLE_ROOT_RTOL = 1e-10
LOCAL_LAMBDA = 0.5
_EDGE = 1e-150
_POLISH_STEPS = 60
_MAX_HALVINGS = 60
_NEAR_EDGE = 1e-6
_BISECT_ITER = 2000


class CaseTag(str, Enum):
    ONE_REAL_ROOT = "OneRealRoot"
    DOUBLE_ROOT = "DoubleRoot"
    THREE_REAL_ROOTS = "ThreeRealRoots"
    QUADRATIC_DEGENERATE = "QuadraticDegenerate"
    BISECTION_FALLBACK = "BisectionFallback"


@dataclass(frozen=True)
class CubicCoefficients:
    """Coefficients of the stationarity cubic and Nickalls' auxiliary quantities.

    ``delta``, ``g`` and ``phi`` are NaN when they are not real (``delta_sq < 0``
    or the one-real-root case for ``phi``).
    """

    a1: float
    a2: float
    a3: float
    m1: float
    m2: float
    m3: float
    m0: float
    x_n: float
    y_n: float
    delta_sq: float
    delta: float
    g_sq: float
    g: float
    phi: float

    @classmethod
    def from_a(cls, a1: float, a2: float, a3: float) -> "CubicCoefficients":
        m1 = a1 + a3 - a2 + a1 * a2 - a1 * a3
        m2 = 3 * a1 * a3 - 2 * a1 - a1 * a2 - 2 * a3
        m3 = a1 - 3 * a1 * a3 + a3
        return cls.from_cubic(m1, m2, m3, a1 * a3, a=(a1, a2, a3))

    @classmethod
    def from_cubic(
        cls, m1: float, m2: float, m3: float, m0: float, a: tuple[float, float, float] = (math.nan,) * 3
    ) -> "CubicCoefficients":
        """Auxiliary quantities for an arbitrary cubic ``m1 x^3 + m2 x^2 + m3 x + m0``."""
        nan = math.nan
        if m1 == 0:
            return cls(*a, m1, m2, m3, m0, nan, nan, nan, nan, nan, nan, nan)
        x_n = -m2 / (3 * m1)
        y_n = 2 * m2**3 / (27 * m1**2) - m2 * m3 / (3 * m1) + m0
        delta_sq = (m2**2 - 3 * m1 * m3) / (9 * m1**2)
        g_sq = 4 * m1**2 * delta_sq**3
        if delta_sq >= 0:
            # sign of delta follows y_n / m1 so that g = 2 m1 delta^3 carries the sign of y_n
            delta = math.copysign(math.sqrt(delta_sq), y_n / m1)
            g = 2 * m1 * delta**3
        else:
            delta = g = nan
        if delta_sq > 0 and y_n**2 <= g_sq:
            phi = math.acos(min(1.0, max(-1.0, -y_n / g))) / 3
        else:
            phi = nan
        return cls(*a, m1, m2, m3, m0, x_n, y_n, delta_sq, delta, g_sq, g, phi)

    @classmethod
    def from_thresholds(cls, cfg: NetworkConfig, thr: RateThresholds) -> "CubicCoefficients":
        g1, g2 = thr.gamma1, thr.gamma2
        a1 = g1 * cfg.loss_a / cfg.loss_b
        a2 = cfg.loss_b * g2 / cfg.rho
        a3 = g1 * cfg.loss_a * (1 + g2) / cfg.rho
        return cls.from_a(a1, a2, a3)

    def polynomial(self, lam):
        return ((self.m1 * lam + self.m2) * lam + self.m3) * lam + self.m0

    def log_ps(self, lam, mu=None):
        """Log success probability as a function of the split alone.

        Equals ``log(lam / (lam + a1 mu)) - a2 / mu - a3 / lam`` with ``mu = 1 - lam``.
        """
        mu = 1 - lam if mu is None else mu
        return -math.log1p(self.a1 * mu / lam) - self.a2 / mu - self.a3 / lam


@dataclass(frozen=True)
class LambdaSolution:
    """Optimal power split; ``complement`` is ``1 - lambda_star`` to full relative precision."""

    lambda_star: float
    case_tag: CaseTag
    residual: float
    complement: float
    candidates: tuple[float, ...] = field(default_factory=tuple)


def theorem1_allocation(cfg: NetworkConfig) -> tuple[float, float, float]:
    """Optimal ``(t1, t2, beta)`` when the tasks cannot finish locally.

    Users and server finish computing simultaneously and the offloading phase
    takes the rest of the deadline; ``beta`` applies to both users.
    """
    if cfg.local_feasible:
        raise LocalComputationSuffices(
            f"M*C/f_user = {cfg.local_time!r} s fits the deadline {cfg.deadline!r} s; execute locally"
        )
    n = cfg.ratio_n
    t2 = 2 * cfg.local_time / (n + 2)
    t1 = cfg.deadline - t2
    if t1 <= 0:
        raise InfeasibleDeadline(f"optimal execution phase {t2!r} s leaves no offloading time")
    beta = n / (n + 2)
    times = execution_times(cfg, OffloadingPlan(t1, t2, beta, beta, LOCAL_LAMBDA))
    assert all(abs(t - t2) <= 4 * TIME_RTOL * max(t2, cfg.local_time) for t in times), times
    return t1, t2, beta


def theorem1_plan(cfg: NetworkConfig, lam: float = LOCAL_LAMBDA) -> OffloadingPlan:
    t1, t2, beta = theorem1_allocation(cfg)
    return OffloadingPlan(t1, t2, beta, beta, lam)


def _xi_terms(coeff: CubicCoefficients, lam, mu=None):
    a1, a2, a3 = coeff.a1, coeff.a2, coeff.a3
    mu = 1 - lam if mu is None else mu
    # lam + a1 mu equals (1 - a1) lam + a1 without cancelling when a1 is huge;
    # dividing by mu twice avoids underflow of mu**2
    return a1 / (lam + a1 * mu), a3 / lam, a2 * lam / mu / mu


def stationarity_xi(coeff: CubicCoefficients, lam, complement=None):
    """Function whose sign matches d(Ps)/d(lam) on (0, 1).

    Pass ``complement = 1 - lam`` explicitly when ``lam`` is within a few ulps of 1.
    """
    share, tail_a, tail_b = _xi_terms(coeff, lam, complement)
    return share + tail_a - tail_b


def _xi_prime(coeff: CubicCoefficients, lam: float, mu: float) -> float:
    a1, a2, a3 = coeff.a1, coeff.a2, coeff.a3
    return -a1 * (1 - a1) / (lam + a1 * mu) ** 2 - a3 / lam**2 - a2 * (1 + lam) / mu / mu / mu


def relative_residual(coeff: CubicCoefficients, lam: float, complement: float = None) -> float:
    """|Xi(lam)| scaled by the sum of the magnitudes of its three terms."""
    terms = _xi_terms(coeff, lam, complement)
    scale = sum(abs(t) for t in terms)
    xi = terms[0] + terms[1] - terms[2]
    return abs(xi) / scale if scale > 0 else abs(xi)


def _split(v: float, upper: bool) -> tuple[float, float]:
    """``(lam, 1 - lam)`` from the smaller of the two, which is the one stored accurately."""
    return (1 - v, v) if upper else (v, 1 - v)


def cubic_roots(coeff: CubicCoefficients) -> tuple[CaseTag, list[float]]:
    """All real roots of the stationarity cubic (or its quadratic degeneration)."""
    m1, m2, m3, m0 = coeff.m1, coeff.m2, coeff.m3, coeff.m0
    if abs(m1) <= CUBIC_EPS * max(abs(m2), abs(m3), abs(m0)):
        if abs(m2) <= CUBIC_EPS * max(abs(m3), abs(m0)):
            raise SolverDegenerate(f"cubic and quadratic coefficients vanish (m1={m1!r}, m2={m2!r})")
        disc = m3**2 - 4 * m2 * m0
        if disc < 0:
            return CaseTag.QUADRATIC_DEGENERATE, []
        # cancellation-free pair of quadratic roots
        q = -0.5 * (m3 + math.copysign(math.sqrt(disc), m3))
        roots = [q / m2] + ([m0 / q] if q != 0 else [])
        return CaseTag.QUADRATIC_DEGENERATE, roots

    x_n, y_n, g_sq = coeff.x_n, coeff.y_n, coeff.g_sq
    gap = y_n**2 - g_sq
    if abs(gap) <= DOUBLE_ROOT_RTOL * max(y_n**2, abs(g_sq)):
        d = coeff.delta
        return CaseTag.DOUBLE_ROOT, [x_n + d, x_n - 2 * d]
    if gap > 0:
        root = math.sqrt(gap)
        lam = x_n + np.cbrt((-y_n + root) / (2 * m1)) + np.cbrt((-y_n - root) / (2 * m1))
        return CaseTag.ONE_REAL_ROOT, [float(lam)]
    d, phi = coeff.delta, coeff.phi
    return CaseTag.THREE_REAL_ROOTS, [x_n + 2 * d * math.cos(phi - 2 * math.pi * i / 3) for i in range(3)]


def _polish(coeff: CubicCoefficients, lam: float) -> tuple[float, float]:
    """Damped Newton refinement of a root estimate; returns ``(lam, 1 - lam)``.

    Iterates on ``lam`` or on ``1 - lam``, whichever is smaller, so that roots
    hugging 1 are resolved to full relative precision. A step is halved until it
    stays inside the interval and lowers the residual.
    """
    upper = lam > 0.5
    v = 1 - lam if upper else lam
    res = relative_residual(coeff, *_split(v, upper))
    for _ in range(_POLISH_STEPS):
        if res <= RESIDUAL_TOL * 1e-3:
            break
        lam_v, mu_v = _split(v, upper)
        slope = _xi_prime(coeff, lam_v, mu_v)
        if slope == 0 or not math.isfinite(slope):
            break
        step = -stationarity_xi(coeff, lam_v, mu_v) / slope
        if upper:
            step = -step
        for _ in range(_MAX_HALVINGS):
            nxt = v + step
            if 0 < nxt < 1:
                nxt_res = relative_residual(coeff, *_split(nxt, upper))
                if nxt_res < res:
                    break
            step /= 2
        else:
            break
        v, res = nxt, nxt_res
    return _split(v, upper)


def bisection_lambda(coeff: CubicCoefficients, tol: float = BISECTION_TOL) -> LambdaSolution:
    """Sign change of Xi by bisection, to width ``tol`` relative to ``min(lam, 1 - lam)``.

    The sign of Xi at 1/2 selects the half; the upper half is bisected in
    ``1 - lam`` so that roots next to 1 keep full precision.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        f_lo = stationarity_xi(coeff, _EDGE, 1.0)
        f_mid = stationarity_xi(coeff, 0.5, 0.5)
        f_hi = stationarity_xi(coeff, 1.0, _EDGE)
    if not (f_lo > 0 > f_hi):
        raise BracketFailure(f"Xi does not change sign on (0, 1): Xi(0+)={f_lo!r}, Xi(1-)={f_hi!r}")
    upper = f_mid > 0
    sign = -1.0 if upper else 1.0

    def xi(v: float) -> float:
        with np.errstate(divide="ignore", over="ignore"):
            return sign * stationarity_xi(coeff, *_split(v, upper))

    v = optimize.bisect(xi, _EDGE, 0.5, xtol=tol * _EDGE, rtol=max(tol, 4 * np.finfo(float).eps), maxiter=_BISECT_ITER)
    lam, mu = _split(v, upper)
    return LambdaSolution(lam, CaseTag.BISECTION_FALLBACK, relative_residual(coeff, lam, mu), mu, (lam,))


def solve_stationarity(coeff: CubicCoefficients, tol: float = RESIDUAL_TOL) -> LambdaSolution:
    """Root of Xi in (0, 1) from the closed-form cubic roots, with bisection as the fallback.

    Roots outside (0, 1) are discarded; should floats leave more than one, the
    one with the highest success probability wins. A degenerate cubic, an empty
    candidate set or a residual above ``tol`` all hand over to bisection.
    """
    try:
        tag, roots = cubic_roots(coeff)
    except SolverDegenerate:
        log.warning("stationarity cubic degenerate; bisecting")
        return bisection_lambda(coeff)

    inside = [r for r in roots if math.isfinite(r) and 0 < r < 1]
    if not inside:
        # a root pushed just past an endpoint by rounding is reflected back and polished
        inside = [abs(r) if r <= 0 else 2 - r for r in roots if -_NEAR_EDGE < r <= 0 or 1 <= r < 1 + _NEAR_EDGE]
        inside = [r for r in inside if 0 < r < 1]
        if inside:
            log.info("%s roots %s sit just outside (0, 1); polishing their reflections", tag.value, roots)
    if not inside:
        log.info("no %s root in (0, 1) (roots=%s); bisecting", tag.value, roots)
        try:
            return bisection_lambda(coeff)
        except BracketFailure as exc:
            raise NoRootInUnitInterval(f"no root in (0, 1) among {roots} and {exc}") from exc
    if len(inside) > 1:
        log.info("%d candidate roots in (0, 1): %s; choosing the best", len(inside), inside)
    polished = [_polish(coeff, r) for r in inside]
    lam, mu = max(polished, key=lambda p: coeff.log_ps(*p))
    residual = relative_residual(coeff, lam, mu)
    if residual > tol:
        log.warning("closed-form root residual %.3g exceeds %.3g; bisecting", residual, tol)
        return bisection_lambda(coeff)
    return LambdaSolution(lam, tag, residual, mu, tuple(roots))


def theorem2_lambda(
    cfg: NetworkConfig, thr: RateThresholds, tol: float = RESIDUAL_TOL
) -> LambdaSolution:
    """Optimal power split for fixed thresholds; see :func:`solve_stationarity`."""
    if thr.gamma1 <= 0 and thr.gamma2 <= 0:
        raise ValueError("power split is irrelevant when nothing is offloaded")
    return solve_stationarity(CubicCoefficients.from_thresholds(cfg, thr), tol)


def grid_lambda(
    cfg: NetworkConfig, thr: RateThresholds, step: float = GRID_STEP
) -> tuple[float, float]:
    """Brute-force ``(argmax, max)`` of the success probability over the grid step, 2*step, ..., 1 - step.

    The search runs on log-probabilities so that it stays meaningful where the
    probability itself underflows.
    """
    count = int(round(1 / step))
    grid = np.arange(1, count) * step
    log_ps = log_ps_given_thresholds(cfg, thr.gamma1, thr.gamma2, grid)
    i = int(np.argmax(log_ps))
    return float(grid[i]), math.exp(log_ps[i])


def optimal_plan(cfg: NetworkConfig) -> tuple[OffloadingPlan, float]:
    """Jointly optimal plan and its success probability.

    Local execution when it meets the deadline (``lam`` fixed at 0.5 by
    convention); otherwise the balanced allocation with the cubic's power split.
    """
    if cfg.local_feasible:
        return OffloadingPlan(0.0, cfg.local_time, 0.0, 0.0, LOCAL_LAMBDA), 1.0
    plan = theorem1_plan(cfg)
    sol = theorem2_lambda(cfg, thresholds(cfg, plan))
    return plan.replace(lam=sol.lambda_star), ps_at_optimum(cfg, sol.lambda_star, sol.complement)


def required_rho(cfg: NetworkConfig, target: float, lo: float = 1.0, hi: float = 1e20, xtol: float = 1e-13) -> float:
    """Smallest SNR ``P / sigma^2`` at which the optimal plan reaches success probability ``target``.

    The optimal probability is nondecreasing in the SNR and tends to one, so
    the crossing is bracketed and found by root search on ``log10(rho)``.
    """
    if not 0.0 < target < 1.0:
        raise ValueError(f"target must lie in (0, 1), got {target!r}")
    if cfg.local_feasible:
        return 0.0

    def gap(log_rho: float) -> float:
        return optimal_plan(cfg.with_rho(10.0**log_rho))[1] - target

    a, b = math.log10(lo), math.log10(hi)
    if gap(a) >= 0:
        return lo
    if gap(b) < 0:
        raise ValueError(f"target {target!r} not reached below rho={hi!r}")
    return 10.0 ** optimize.brentq(gap, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps)
