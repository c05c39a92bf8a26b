"""Binary linear codes: encoding, codebooks, sum sets and ML decoding over GF(2).

Words are 1-D ``uint8`` numpy arrays with entries in {0, 1}; matrices are 2-D.
Column index 0 is the leftmost bit everywhere (including the hex format).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DimensionError, ResourceLimitError, ValidationError

ENUMERATION_CAP_K = 20
SUM_SET_CAP = 2 ** 26


def as_word(bits) -> np.ndarray:
    """Coerce a bit sequence (list, str of 0/1, array) to a uint8 vector."""
    if isinstance(bits, str):
        bits = [int(c) for c in bits.strip()]
    arr = np.asarray(bits)
    if arr.ndim != 1:
        raise DimensionError(f"expected a 1-D bit vector, got shape {arr.shape}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValidationError("bit vectors may only contain 0 and 1")
    return arr.astype(np.uint8)


def as_matrix(rows) -> np.ndarray:
    arr = np.asarray(rows)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D bit matrix, got shape {arr.shape}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValidationError("bit matrices may only contain 0 and 1")
    return arr.astype(np.uint8)


def gf2_rank(matrix) -> int:
    """Rank over GF(2) by Gaussian elimination."""
    mat = as_matrix(matrix).copy()
    rows, cols = mat.shape
    rank = 0
    for col in range(cols):
        pivots = np.flatnonzero(mat[rank:, col]) + rank
        if pivots.size == 0:
            continue
        p = pivots[0]
        if p != rank:
            mat[[rank, p]] = mat[[p, rank]]
        hits = np.flatnonzero(mat[:, col])
        hits = hits[hits != rank]
        mat[hits] ^= mat[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def message_bits(index: int, k: int) -> np.ndarray:
    """Message vector for an integer index; bit 0 (leftmost) is the most significant."""
    return np.array([(index >> (k - 1 - j)) & 1 for j in range(k)], dtype=np.uint8)


def message_index(w) -> int:
    out = 0
    for b in as_word(w):
        out = (out << 1) | int(b)
    return out


def all_messages(k: int) -> np.ndarray:
    """All 2^k messages as rows, ordered by message index ascending."""
    idx = np.arange(2 ** k, dtype=np.int64)
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class LinearCodeSpec:
    """Generator matrix ``G`` (k x n) plus one dither word per user.

    User ``i`` (1-based) encodes ``w`` as ``w G + b_i``.
    """

    generator: np.ndarray
    dithers: tuple = field(default=None)

    def __post_init__(self):
        g = as_matrix(self.generator)
        k, n = g.shape
        if k < 1 or n < 1:
            raise DimensionError("generator must have k >= 1 rows and n >= 1 columns")
        dithers = self.dithers
        if dithers is None:
            dithers = (np.zeros(n, np.uint8),) * 3
        dithers = tuple(as_word(b) for b in dithers)
        if len(dithers) != 3:
            raise DimensionError("exactly three dither words are required")
        for b in dithers:
            if b.size != n:
                raise DimensionError(f"dither length {b.size} != code length {n}")
        g.setflags(write=False)
        for b in dithers:
            b.setflags(write=False)
        object.__setattr__(self, "generator", g)
        object.__setattr__(self, "dithers", dithers)

    @property
    def k(self) -> int:
        return self.generator.shape[0]

    @property
    def n(self) -> int:
        return self.generator.shape[1]

    @classmethod
    def random(cls, k: int, n: int, rng: np.random.Generator, dithered: bool = False):
        g = rng.integers(0, 2, size=(k, n), dtype=np.uint8)
        if dithered:
            dithers = tuple(rng.integers(0, 2, size=n, dtype=np.uint8) for _ in range(3))
        else:
            dithers = None
        return cls(g, dithers)

    @classmethod
    def random_full_rank(cls, k: int, n: int, rng: np.random.Generator, dithered: bool = False,
                         max_tries: int = 1000):
        """Uniform over rank-k generators (rejection sampling; needs k <= n)."""
        if not 1 <= k <= n:
            raise DimensionError(f"a rank-{k} generator needs 1 <= k <= n={n}")
        for _ in range(max_tries):
            code = cls.random(k, n, rng, dithered)
            if gf2_rank(code.generator) == k:
                return code
        raise ResourceLimitError("no full-rank generator found")

    def dither(self, user: int) -> np.ndarray:
        if user not in (1, 2, 3):
            raise ValidationError(f"user must be 1, 2 or 3, got {user}")
        return self.dithers[user - 1]


def encode(w, code: LinearCodeSpec, user: int = 1) -> np.ndarray:
    """Return ``w G + b_user`` over GF(2)."""
    w = as_word(w)
    if w.size != code.k:
        raise DimensionError(f"message length {w.size} != generator rows {code.k}")
    word = (w.astype(np.int64) @ code.generator.astype(np.int64)) % 2
    return word.astype(np.uint8) ^ code.dither(user)


def encode_many(messages: np.ndarray, code: LinearCodeSpec, user: int = 1) -> np.ndarray:
    messages = np.asarray(messages, dtype=np.int64)
    if messages.ndim != 2 or messages.shape[1] != code.k:
        raise DimensionError("messages must be an (m, k) array")
    words = (messages @ code.generator.astype(np.int64)) % 2
    return words.astype(np.uint8) ^ code.dither(user)[None, :]


@dataclass(frozen=True, eq=False)
class Codebook:
    """A list of equal-length words; row ``m`` is the codeword of message ``m``."""

    words: np.ndarray
    kind: str = "explicit_list"

    def __post_init__(self):
        words = as_matrix(self.words)
        if words.shape[0] < 1:
            raise DimensionError("a codebook needs at least one word")
        if self.kind not in ("linear_coset", "explicit_list"):
            raise ValidationError(f"unknown codebook kind {self.kind!r}")
        words.setflags(write=False)
        object.__setattr__(self, "words", words)

    def __len__(self) -> int:
        return self.words.shape[0]

    @property
    def n(self) -> int:
        return self.words.shape[1]

    @cached_property
    def signs(self) -> np.ndarray:
        # +1/-1 image used for correlation-based distance computations
        return (1.0 - 2.0 * self.words).astype(np.float32)

    @cached_property
    def keys(self) -> np.ndarray:
        return word_keys(self.words)

    def distinct_count(self) -> int:
        return int(np.unique(self.keys, axis=0).shape[0])

    def xor(self, d) -> "Codebook":
        d = as_word(d)
        if d.size != self.n:
            raise DimensionError("shift word has the wrong length")
        return Codebook(self.words ^ d[None, :], self.kind)

    @classmethod
    def random(cls, k: int, n: int, rng: np.random.Generator) -> "Codebook":
        """2^k i.i.d. uniform words (duplicates allowed)."""
        return cls(rng.integers(0, 2, size=(2 ** k, n), dtype=np.uint8), "explicit_list")


def word_keys(words: np.ndarray) -> np.ndarray:
    """Hashable per-row keys: uint64 for n <= 64, packed byte rows otherwise."""
    words = np.asarray(words, dtype=np.uint8)
    n = words.shape[-1]
    if n <= 64:
        weights = np.left_shift(np.uint64(1), np.arange(n, dtype=np.uint64))
        return (words.astype(np.uint64) * weights).sum(axis=-1, dtype=np.uint64)
    return np.packbits(words, axis=-1)


def enumerate_codebook(code: LinearCodeSpec, user: int = 1, cap_k: int = ENUMERATION_CAP_K) -> Codebook:
    if code.k > cap_k:
        raise ResourceLimitError(f"k={code.k} exceeds the enumeration cap {cap_k}")
    return Codebook(encode_many(all_messages(code.k), code, user), "linear_coset")


def sum_codebook_stats(a: Codebook, b: Codebook, cap: int = SUM_SET_CAP) -> dict:
    """log2 sizes of the distinct word sets of A, B and {x + y : x in A, y in B}."""
    if a.n != b.n:
        raise DimensionError("codebooks have different word lengths")
    if len(a) * len(b) > cap:
        raise ResourceLimitError(f"|A||B| = {len(a) * len(b)} exceeds the cap {cap}")
    if a.n <= 64:
        sums = (a.keys[:, None] ^ b.keys[None, :]).ravel()
        card_sum = np.unique(sums).size
    else:
        sums = (a.keys[:, None, :] ^ b.keys[None, :, :]).reshape(-1, a.keys.shape[1])
        card_sum = np.unique(sums, axis=0).shape[0]
    return {
        "log2_card_A": float(np.log2(a.distinct_count())),
        "log2_card_B": float(np.log2(b.distinct_count())),
        "log2_card_sum": float(np.log2(card_sum)),
    }


def hamming_distances(y, candidates: Codebook) -> np.ndarray:
    y = as_word(y)
    if y.size != candidates.n:
        raise DimensionError("received word and codewords differ in length")
    return np.count_nonzero(candidates.words != y[None, :], axis=1)


def ml_decode_bsc(y, candidates: Codebook, delta: float = 0.0) -> int:
    """Maximum-likelihood decoding over a BSC(delta), i.e. minimum Hamming distance.

    Ties go to the smallest message index.
    """
    if not 0.0 <= delta < 0.5:
        raise ValidationError(f"crossover must lie in [0, 0.5), got {delta}")
    return int(np.argmin(hamming_distances(y, candidates)))


def ml_decode_sum(y, a: Codebook, b: Codebook, delta: float = 0.0) -> tuple[int, int]:
    """Jointly decode the pair (i, j) minimising d(a_i + b_j, y).

    Ties go to the smallest ``i * |B| + j``.
    """
    if not 0.0 <= delta < 0.5:
        raise ValidationError(f"crossover must lie in [0, 0.5), got {delta}")
    y = as_word(y)
    if a.n != b.n or y.size != a.n:
        raise DimensionError("word lengths disagree")
    sy = (1.0 - 2.0 * y).astype(np.float32)
    # correlation of a_i + b_j + y with the all-ones word; n - 2 d
    corr = (a.signs * sy[None, :]) @ b.signs.T
    flat = int(np.argmax(corr))
    return divmod(flat, len(b))


# --- hex text format -------------------------------------------------------

def _row_to_hex(row: np.ndarray) -> str:
    n = row.size
    padded = np.zeros(-(-n // 4) * 4, dtype=np.uint8)
    padded[:n] = row
    nibbles = padded.reshape(-1, 4) @ np.array([8, 4, 2, 1])
    return "".join(f"{v:x}" for v in nibbles)


def _hex_to_row(text: str, n: int) -> np.ndarray:
    text = text.strip()
    if len(text) != -(-n // 4):
        raise DimensionError(f"hex row {text!r} does not encode {n} bits")
    bits = []
    for c in text:
        v = int(c, 16)
        bits.extend((v >> s) & 1 for s in (3, 2, 1, 0))
    tail = bits[n:]
    if any(tail):
        raise ValidationError("nonzero padding bits in hex row")
    return np.array(bits[:n], dtype=np.uint8)


def dumps_hex(matrix) -> str:
    """Hex text: a ``# n=<cols>`` header then one row per line.

    Character ``p`` of a row holds columns ``4p..4p+3`` with column ``4p`` in the
    nibble's most significant bit; the last nibble is zero-padded.
    """
    mat = as_matrix(np.atleast_2d(matrix))
    lines = [f"# n={mat.shape[1]}"]
    lines.extend(_row_to_hex(r) for r in mat)
    return "\n".join(lines) + "\n"


def loads_hex(text: str, n: int | None = None) -> np.ndarray:
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("n=") and n is None:
                n = int(body[2:])
            continue
        rows.append(line)
    if n is None:
        raise ValidationError("bit length unknown: pass n or include a '# n=' header")
    if not rows:
        return np.zeros((0, n), dtype=np.uint8)
    return np.stack([_hex_to_row(r, n) for r in rows])


def dumps_code(code: LinearCodeSpec) -> str:
    """Generator rows, then a ``# dithers`` marker and the three dither rows."""
    body = dumps_hex(code.generator)
    dithers = "\n".join(_row_to_hex(b) for b in code.dithers)
    return body + "# dithers\n" + dithers + "\n"


def loads_code(text: str) -> LinearCodeSpec:
    head, sep, tail = text.partition("# dithers")
    g = loads_hex(head)
    if not sep:
        return LinearCodeSpec(g)
    d = loads_hex(tail, n=g.shape[1])
    return LinearCodeSpec(g, tuple(d))


def rows_of(words: Sequence) -> np.ndarray:
    return np.stack([as_word(w) for w in words])
