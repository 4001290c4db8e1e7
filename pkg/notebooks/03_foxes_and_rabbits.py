"""
Foxes and rabbits
=================

A discrete predator-prey model over a small grid of starting populations.
A bound on rabbits at every late time decomposes into one bound per time,
and that shows up in what each initial fox count ensures.
"""

# %%
from mereo import ensures, strongly_disjoint
from mereo.dsl import parse_constraint
from mereo.systems import LOTKA_VOLTERRA_DESK, build, deadline_scenario, is_deterministic

m = build(LOTKA_VOLTERRA_DESK)
print(m.system.size, "trajectories over", sorted(m.parts)[:4], "...")
print("deterministic:", is_deterministic(m), " foxes/rabbits independent at t=0:",
      strongly_disjoint(m["Fox_0"], m["Rabbit_0"]))

# %%
fox0 = m["Fox_0"]
f0 = [m.system.label(int(s))["f_0"] for s in fox0.representatives()]
for t in (1, 4, 7):
    safe = ensures(parse_constraint("r_t > 10", m[f"Rabbit_{t}"], {"t": t}), fox0)
    print(f"t={t}: rabbits surely above 10 when f_0 in", [f0[b] for b in safe.blocks()])

# %%
r = deadline_scenario(m, d=4, k1=1, k2=60)
print("joint:", [int(b) for b in r["whole"].bits])
for t, c in zip(r["times"], r["per_t"]):
    print(f"  t={t}:", [int(b) for b in c.bits])
print("equal:", r["equal"])
