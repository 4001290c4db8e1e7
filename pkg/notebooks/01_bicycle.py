"""
Pedals and wheels
=================

A bicycle seen through two parts: the pedal speed and the wheel speed.
The gear ratio ties them together, so a wheel constraint says something
about pedals and the other way round.
"""

# %%
from mereo import allows, compatibility_table, ensures, meet, join
from mereo.dsl import parse_constraint
from mereo.systems import BICYCLE_DESK, build

bike = build(BICYCLE_DESK)
pedal, wheel = bike["Pedal"], bike["Wheel"]
print(bike.system.size, "behaviors;", pedal.block_count, "pedal speeds,", wheel.block_count, "wheel speeds")

# %% [markdown]
# Which pedal speeds are still possible if the wheel turns slowly?

# %%
slow = parse_constraint("w <= 2", wheel)
ok = allows(slow, pedal)
for b in ok.blocks():
    print("pedal", bike.system.label(int(pedal.representatives()[b]))["p"])

# %% [markdown]
# The dual question: which wheel speeds force the pedal to be slow?

# %%
forced = ensures(parse_constraint("p <= 1", pedal), wheel)
print([bike.system.label(int(wheel.representatives()[b]))["w"] for b in forced.blocks()])

# %%
# rows are pedal blocks, columns wheel blocks
print(compatibility_table(pedal, wheel).astype(int))

# %%
# nothing is shared between pedal and wheel, and together they pin down a behavior
print(meet(pedal, wheel).block_count, join(pedal, wheel).block_count)
