"""
Power split between the two users
=================================

The near user is decoded first, so it must beat the far user's interference.
The closed-form split is compared with a fine grid search over lambda, and
the success probability is printed as a function of lambda.
"""

import numpy as np

from nomamec import NetworkConfig, grid_lambda, ps_given_thresholds, theorem1_plan, theorem2_lambda, thresholds

cfg = NetworkConfig()
thr = thresholds(cfg, theorem1_plan(cfg))
print(f"rate thresholds: gamma1 = {thr.gamma1:.6f}, gamma2 = {thr.gamma2:.6f}")

sol = theorem2_lambda(cfg, thr)
lam_grid, ps_grid = grid_lambda(cfg, thr, 1e-5)
print(f"closed form: lambda* = {sol.lambda_star:.10f} ({sol.case_tag.value}, residual {sol.residual:.1e})")
print(f"grid search: lambda  = {lam_grid:.10f}")

lam = np.linspace(0.05, 0.95, 19)
ps = ps_given_thresholds(cfg, thr.gamma1, thr.gamma2, lam)
for x, p in zip(lam, ps):
    bar = "#" * int(round(60 * p))
    print(f"{x:5.2f} {p:8.5f} {bar}")

# higher SNR lets the near user take more of the power
for rho in (1e8, 1e9, 1e10, 1e11, 1e12):
    c = cfg.with_rho(rho)
    s = theorem2_lambda(c, thresholds(c, theorem1_plan(c)))
    print(f"rho {rho:7.0e}: lambda* = {s.lambda_star:.8f}, 1 - lambda* = {s.complement:.3e}")
