"""
Accessibility as a part
=======================

An equivalence relation on worlds is the kernel of a part. Box and diamond
then become transport of a constraint onto that part and back.
"""

# %%
from mereo import Constraint, System, bottom, kripke_box, kripke_diamond, part_from_assignment, possible, top

W = System("W", ("world",), [(w,) for w in "abcdef"])
A = part_from_assignment(W, "A", [0, 0, 1, 1, 1, 2])
rain = Constraint(top(W), [0, 1, 1, 1, 1, 0])

print("diamond", kripke_diamond(W, A, rain).blocks())
print("box    ", kripke_box(W, A, rain).blocks())

# %%
# every world sees only itself: nothing changes
print(kripke_diamond(W, top(W), rain) == rain == kripke_box(W, top(W), rain))

# %%
# every world sees every world: plain possibility
print(kripke_diamond(W, bottom(W), rain).bits, possible(rain).bits)
