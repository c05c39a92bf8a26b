"""Structured vs unstructured codes over the example channel with feedback."""
import numpy as np

from macfb.scheme import SchemeConfig, run_trial

delta, k, n, L, T = 0.115, 12, 48, 20, 20
print(f"delta={delta}, rate per user {k / n}, 1-h(delta)={1 + delta * np.log2(delta) + (1 - delta) * np.log2(1 - delta):.3f}")

for kind in ("linear_identical", "random_independent"):
    cfg = SchemeConfig(k=k, n=n, L=L, delta=delta, codebook_kind=kind, master_seed=5)
    reps = [run_trial(cfg, t) for t in range(T)]
    err = np.mean([r.message_error_rate for r in reps])
    e1 = np.mean([r.e1.mean() for r in reps])
    s1 = np.mean([r.state1_frac.mean() for r in reps])
    print(f"{kind:20s} message error {err:.3f}  sum-decode error {e1:.3f}  state-1 positions {s1:.3f}")

# a single transcript shows the block-Markov wiring: stage 2 of block b repeats
# stage 1 of block b-1, and encoder 3 adds its estimate of the pair sum
rep = run_trial(SchemeConfig(k=4, n=12, L=3, delta=0.05), 0, keep_transcript=True)
for rec in rep.transcript:
    print(rec.block, "x12", "".join(map(str, rec.x["x12"])), "x22", "".join(map(str, rec.x["x22"])),
          "x32", "".join(map(str, rec.x["x32"])), "state-1 frac", rec.state_one.mean())
