"""Why a shared linear code helps: the XOR of two codewords stays inside the code."""
import numpy as np

from macfb.gf2 import Codebook, LinearCodeSpec, enumerate_codebook, sum_codebook_stats

rng = np.random.default_rng(1)
k, n = 8, 32

# one generator shared by both users
code = LinearCodeSpec.random_full_rank(k, n, rng)
cb = enumerate_codebook(code)
print("linear:", sum_codebook_stats(cb, cb))   # the sum set has the same 2^8 words

# two unstructured codebooks of the same size
a, b = Codebook.random(k, n, rng), Codebook.random(k, n, rng)
print("random:", sum_codebook_stats(a, b))     # nearly all 2^16 sums are distinct

# squeeze the length so 2k > n: the sum set saturates the ambient space
a, b = Codebook.random(8, 12, rng), Codebook.random(8, 12, rng)
s = sum_codebook_stats(a, b)
print("random, n=12: gap", s["log2_card_sum"] - s["log2_card_A"], "bits (n - k = 4)")

# encoder 3 must learn x12 + x22 from y1 = x11 + x21 + x31 + noise at rate 2k/n
# when the codes are unstructured, but only at k/n with the shared code.
