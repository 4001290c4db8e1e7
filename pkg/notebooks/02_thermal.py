"""
Cooling water
=============

Water relaxes toward room temperature R by a fixed fraction k per step.
Each time slice is a part of the trajectory system, and determinism shows
up as parthood: the initial temperature is a finer part than any later one.
"""

# %%
import numpy as np

from mereo import allows, connecting_map, eq_constraint, is_subpart
from mereo.systems import THERMAL_DESK, build, gen_thermal, temporal_part

m = build(THERMAL_DESK)
R = THERMAL_DESK.params["R"]
for t in range(4):
    print(t, is_subpart(m["Water_0"], m[f"Water_{t}"]), m[f"Water_{t}"].block_count)

# %%
# the connecting map Water_0 -> Water_1 is the recurrence itself
t0 = [m.system.label(int(s))["T_0"] for s in m["Water_0"].representatives()]
t1 = [m.system.label(int(s))["T_1"] for s in m["Water_1"].representatives()]
print([(a, t1[b]) for a, b in zip(t0, connecting_map(m["Water_0"], m["Water_1"]))])

# %% [markdown]
# Starting at 0 degrees, which temperatures can the water have at t = 3?
# Only ones closer to R than where it started.

# %%
w0, w3 = m["Water_0"], m["Water_3"]
reach = allows(eq_constraint(w0, t0.index(0)), w3)
t3 = np.array([m.system.label(int(s))["T_3"] for s in w3.representatives()])
print(t3[reach.bits], "distance", np.abs(R - t3[reach.bits]), "vs", abs(R - 0))

# %%
# k = 1 reaches R in one step; afterwards the slices carry no information
hot = gen_thermal(1, 20, [0, 10, 30], 3)
print([hot[f"Water_{t}"].block_count for t in range(3)])

# %%
print(temporal_part(m, [0, 1]).block_count, temporal_part(m, range(4)).block_count)
