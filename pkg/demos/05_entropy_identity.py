"""H(Y|X) of the example channel when a fraction q of positions is in state 2."""
from macfb.channel import mixture_entropy_closed_form, mixture_conditional_entropy

for delta in (0.05, 0.1, 0.25):
    for q in (0.0, 0.3, 1.0):
        closed = mixture_entropy_closed_form(delta, q)
        numeric = mixture_conditional_entropy(delta, q)
        print(f"delta={delta:<5} q={q:<4} closed {closed:.6f} numeric {numeric:.6f}")

# state decided by x31 instead of x32: the identity no longer tracks q
print("x31 rule, q=0:", mixture_conditional_entropy(0.1, 0.0, "x31"))
