"""
Optimal time and ratio allocation
=================================

When the tasks do not fit locally, the best plan offloads the same share
from both users and makes the local and server phases finish together, then
uses all remaining time for offloading.
"""

from nomamec import NetworkConfig, execution_times, optimal_plan, theorem1_allocation

cfg = NetworkConfig()
print(f"local execution would take {cfg.local_time * 1e3:.1f} ms, deadline {cfg.deadline * 1e3:.1f} ms")

t1, t2, beta = theorem1_allocation(cfg)
print(f"offload time t1 = {t1 * 1e3:.4f} ms, execution time t2 = {t2 * 1e3:.4f} ms, ratio = {beta:.4f}")
print("  exact values: 30/7 ms, 40/7 ms, 5/7")

plan, ps = optimal_plan(cfg)
t_a, t_b, t_mec = execution_times(cfg, plan)
print(f"phase times: user A {t_a * 1e3:.4f} ms, user B {t_b * 1e3:.4f} ms, server {t_mec * 1e3:.4f} ms")
print(f"optimal power split {plan.lam:.6f}, success probability {ps:.6f}")

# a faster server pushes the ratio towards complete offloading
for n in (3, 5, 20, 100):
    _, _, beta = theorem1_allocation(cfg.replace(ratio_n=n))
    print(f"server {n:>3}x faster: ratio {beta:.4f}")

# small tasks run locally and always succeed
small = cfg.replace(task_bits=4e3)
plan, ps = optimal_plan(small)
print(f"4 kbit task: t1 = {plan.t1}, t2 = {plan.t2 * 1e3:.1f} ms, success probability {ps}")
