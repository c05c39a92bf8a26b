"""Feedback enlarges the multi-letter sum bound on the example channel."""
from macfb.channel import ExampleChannel
from macfb.region import example_tracking_policies, iid_policies, multiletter_region

import numpy as np

ch = ExampleChannel(0.1).table()
uniform = [np.full(4, 0.25)] * 3

no_fb = multiletter_region(ch, iid_policies(ch, uniform, 1), 1)
print("no feedback, sum bound:", round(no_fb["R1+R2+R3"].bound, 4))

# users 1 and 2 repeat their previous first bit on the second input; user 3
# reads y1 from the feedback, strips its own bit and sends the pair sum
for L in (2, 3):
    poly = multiletter_region(ch, example_tracking_policies(L), L)
    print(f"tracking L={L}, sum bound:", round(poly["R1+R2+R3"].bound, 4))

# the bound keeps climbing toward 3(1 - h(0.1)) = 1.593 as the startup block amortizes
