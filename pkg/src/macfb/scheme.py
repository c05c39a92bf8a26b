"""Block-Markov transmission over the example channel.

Transmission block ``b`` (1-based) carries:

* ``x_i1[b]``: codeword of user i's fresh message ``w_i[b]`` (all-zero in the
  extra termination block ``L + 1``);
* ``x_i2[b] = x_i1[b-1]`` for users 1 and 2 (zero in block 1);
* ``x_32[b]``: encoder 3's estimate of ``x_12[b] + x_22[b]`` obtained from the
  feedback ``y_1[b-1]`` (zero in block 1).

The receiver decodes the messages of block ``b - 1`` after block ``b``, so all
``L`` message blocks are decoded after ``L + 1`` transmission blocks. Payload is
``3 k L`` bits over ``n (L + 1)`` channel uses; the per-user code rate is ``k / n``.

Two codebook kinds are supported: ``linear_identical`` (one generator matrix shared
by all users, the sum decode runs over that same code) and ``random_independent``
(three independent lists of 2^k uniform words; encoder 3 decodes the sum word
over the pairwise sum set and transmits the nearest word of its own list).
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .channel import ChannelInput, ExampleChannel
from .errors import ResourceLimitError, ValidationError
from .gf2 import (Codebook, LinearCodeSpec, as_matrix, enumerate_codebook, gf2_rank, ml_decode_bsc,
                  ml_decode_sum)
from .seeding import trial_rng

CODEBOOK_KINDS = ("linear_identical", "random_independent")
PAIR_DECODE_CAP_K = 13


@dataclass(frozen=True)
class SchemeConfig:
    k: int
    n: int
    L: int
    delta: float
    codebook_kind: str = "linear_identical"
    master_seed: int = 0
    generator: tuple | None = None  # fixed G rows; drawn per trial when None
    state_rule: str = "x32"

    def __post_init__(self):
        if self.codebook_kind not in CODEBOOK_KINDS:
            raise ValidationError(f"codebook_kind must be one of {CODEBOOK_KINDS}")
        kmin = 1 if self.codebook_kind == "linear_identical" else 0
        if not kmin <= self.k <= self.n:
            raise ValidationError(f"need {kmin} <= k <= n, got k={self.k}, n={self.n}")
        if self.L < 2:
            raise ValidationError("L must be at least 2")
        if not 0.0 <= self.delta < 0.5:
            raise ValidationError("delta must lie in [0, 0.5)")
        if self.master_seed < 0 or self.master_seed >= 2 ** 64:
            raise ValidationError("master_seed must be an unsigned 64-bit integer")
        if self.codebook_kind == "random_independent" and self.k > PAIR_DECODE_CAP_K:
            raise ResourceLimitError(f"pair decoding over 2^(2k) sums caps k at {PAIR_DECODE_CAP_K}")
        if self.generator is not None:
            g = as_matrix(self.generator)
            if g.shape != (self.k, self.n):
                raise ValidationError(f"generator shape {g.shape} != ({self.k}, {self.n})")
            if gf2_rank(g) != self.k:
                raise ValidationError("generator must have full row rank")
            object.__setattr__(self, "generator", tuple(tuple(int(b) for b in r) for r in g))

    @property
    def rate(self) -> float:
        return self.k / self.n

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "SchemeConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ValidationError(f"unknown scheme fields: {sorted(unknown)}")
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ValidationError(str(exc)) from None


@dataclass
class BlockRecord:
    """Everything sent and estimated in one transmission block."""

    block: int
    messages: tuple
    x: dict
    y: dict
    sum_estimate: object
    decoded: tuple | None
    state_one: np.ndarray


@dataclass
class TrialReport:
    """Per-message-block error flags and stage-2 state statistics of one trial.

    Index ``l`` of every per-block array refers to message block ``l + 1``; its
    stage-2 transmission happens in transmission block ``l + 2``. ``mismatch[l]``
    marks the positions of that transmission where ``x_32 != x_12 + x_22``.
    """

    config: SchemeConfig
    trial_index: int
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    msg_error: np.ndarray
    mismatch: np.ndarray
    transcript: list = field(default_factory=list, repr=False)

    @property
    def state1_frac(self) -> np.ndarray:
        return 1.0 - self.mismatch.mean(axis=1)

    @property
    def counts(self) -> dict:
        return {"E1": int(self.e1.sum()), "E2": int(self.e2.sum()), "E3": int(self.e3.sum())}

    @property
    def message_error_rate(self) -> float:
        return float(self.msg_error.mean())

    @property
    def rate(self) -> float:
        return self.config.rate

    @property
    def payload_bits(self) -> int:
        return 3 * self.config.k * self.config.L

    @property
    def channel_uses(self) -> int:
        return self.config.n * (self.config.L + 1)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "trial_index": self.trial_index,
            "counts": self.counts,
            "E1": self.e1.astype(int).tolist(),
            "E2": self.e2.astype(int).tolist(),
            "E3": self.e3.astype(int).tolist(),
            "msg_error": self.msg_error.astype(int).tolist(),
            "state1_frac": self.state1_frac.tolist(),
            "mismatch": ["".join("1" if v else "0" for v in row) for row in self.mismatch],
            "rate_per_user": self.rate,
            "payload_bits": self.payload_bits,
            "channel_uses": self.channel_uses,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _books(cfg: SchemeConfig, rng: np.random.Generator) -> tuple:
    if cfg.codebook_kind == "linear_identical":
        g = np.array(cfg.generator, dtype=np.uint8) if cfg.generator is not None else None
        code = LinearCodeSpec(g) if g is not None else LinearCodeSpec.random_full_rank(cfg.k, cfg.n, rng)
        cb = enumerate_codebook(code)
        return cb, cb, cb
    return tuple(Codebook.random(cfg.k, cfg.n, rng) for _ in range(3))


def _simulate(cfg: SchemeConfig, trial_index: int, keep_transcript: bool) -> TrialReport:
    rng = trial_rng(cfg.master_seed, trial_index)
    books = _books(cfg, rng)
    linear = cfg.codebook_kind == "linear_identical"
    channel = ExampleChannel(cfg.delta, cfg.state_rule)
    n, L, M = cfg.n, cfg.L, 2 ** cfg.k
    msgs = rng.integers(0, M, size=(3, L))
    zero = np.zeros(n, dtype=np.uint8)

    e1 = np.zeros(L, bool)
    e2 = np.zeros(L, bool)
    e3 = np.zeros(L, bool)
    mismatch = np.zeros((L, n), bool)
    transcript = []

    prev_x1 = (zero, zero, zero)
    prev_y1 = None
    x32 = zero
    for b in range(1, L + 2):
        if b <= L:
            x1 = tuple(books[i].words[msgs[i, b - 1]] for i in range(3))
        else:
            x1 = (zero, zero, zero)
        x12, x22 = prev_x1[0], prev_x1[1]
        inp = ChannelInput((x1[0], x12), (x1[1], x22), (x1[2], x32))
        out = channel.step(inp, rng)
        state_one = channel.state_one(inp)
        if b >= 2:
            mismatch[b - 2] = x32 != (x12 ^ x22)

        decoded = None
        if b >= 2:
            # receiver: messages of block b-1 from y2[b], then user 3 from y1[b-1]
            l = b - 2
            w1 = ml_decode_bsc(out.y21, books[0], cfg.delta)
            w2 = ml_decode_bsc(out.y22, books[1], cfg.delta)
            y_tilde = prev_y1 ^ books[0].words[w1] ^ books[1].words[w2]
            w3 = ml_decode_bsc(y_tilde, books[2], cfg.delta)
            e2[l] = w1 != msgs[0, l] or w2 != msgs[1, l]
            e3[l] = w3 != msgs[2, l]
            decoded = (w1, w2, w3)

        sum_estimate = None
        next_x32 = zero
        if b <= L:
            # encoder 3: strip its own stage-1 word from the fed-back y1
            z = out.y1 ^ x1[2]
            l = b - 1
            if linear:
                sum_estimate = ml_decode_bsc(z, books[0], cfg.delta)
                e1[l] = sum_estimate != (msgs[0, l] ^ msgs[1, l])
                next_x32 = books[0].words[sum_estimate]
            else:
                i, j = ml_decode_sum(z, books[0], books[1], cfg.delta)
                sum_word = books[0].words[i] ^ books[1].words[j]
                sum_estimate = sum_word
                e1[l] = bool((sum_word != (x1[0] ^ x1[1])).any())
                next_x32 = books[2].words[ml_decode_bsc(sum_word, books[2], cfg.delta)]

        if keep_transcript:
            transcript.append(BlockRecord(
                block=b,
                messages=tuple(int(msgs[i, b - 1]) for i in range(3)) if b <= L else None,
                x={"x11": x1[0], "x12": x12, "x21": x1[1], "x22": x22, "x31": x1[2], "x32": x32},
                y={"y1": out.y1, "y21": out.y21, "y22": out.y22},
                sum_estimate=sum_estimate,
                decoded=decoded,
                state_one=np.asarray(state_one),
            ))
        prev_x1, prev_y1, x32 = x1, out.y1, next_x32

    msg_error = e2 | e3
    return TrialReport(cfg, trial_index, e1, e2, e3, msg_error, mismatch, transcript)


def run_trial(cfg: SchemeConfig, trial_index: int = 0, keep_transcript: bool = False) -> TrialReport:
    """One trial of the scheme selected by ``cfg.codebook_kind``.

    The trial's random stream is derived from ``(cfg.master_seed, trial_index)``.
    """
    return _simulate(cfg, trial_index, keep_transcript)


def run_baseline_trial(cfg: SchemeConfig, trial_index: int = 0,
                       keep_transcript: bool = False) -> TrialReport:
    if cfg.codebook_kind != "random_independent":
        raise ValidationError("the baseline needs codebook_kind='random_independent'")
    return _simulate(cfg, trial_index, keep_transcript)


def position_mismatch_frequency(reports) -> np.ndarray:
    reports = list(reports)
    if not reports:
        raise ValidationError("at least one completed trial is required")
    return np.mean([r.mismatch for r in reports], axis=0)


def empirical_state_fraction(reports, c: float) -> float:
    """Fraction of the nL stage-2 positions whose estimated mismatch probability is >= c."""
    freq = position_mismatch_frequency(reports)
    return float((freq >= c).mean())
