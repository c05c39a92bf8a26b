"""Three-user discrete memoryless MAC: generic tables and the two-part example channel.

Example channel symbols: user ``i`` sends the bit pair ``(x_i1, x_i2)``, coded as the
integer ``2*x_i1 + x_i2``; the output ``(y1, y21, y22)`` is coded as
``4*y1 + 2*y21 + y22``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from pathlib import Path

import numpy as np

from .errors import SchemaError, ValidationError
from .info import binary_entropy

STATE_RULES = ("x32", "x31")


@dataclass(frozen=True)
class ChannelInput:
    """Per-user bit pairs. Entries may be ints or equal-shape bit arrays."""

    x1: tuple
    x2: tuple
    x3: tuple

    @classmethod
    def from_symbols(cls, s1: int, s2: int, s3: int) -> "ChannelInput":
        return cls(*((s >> 1 & 1, s & 1) for s in (s1, s2, s3)))

    def symbols(self) -> tuple:
        return tuple(2 * np.asarray(a) + np.asarray(b) for a, b in (self.x1, self.x2, self.x3))


@dataclass(frozen=True)
class ChannelOutput:
    y1: object
    y21: object
    y22: object

    def symbol(self):
        return 4 * np.asarray(self.y1) + 2 * np.asarray(self.y21) + np.asarray(self.y22)


@dataclass(frozen=True)
class TableChannel:
    """``pmf[x1, x2, x3, y] = p(y | x1, x2, x3)``."""

    pmf: np.ndarray

    def __post_init__(self):
        pmf = np.array(self.pmf, dtype=float)
        if pmf.ndim != 4:
            raise SchemaError(f"channel table must have 4 axes, got {pmf.ndim}")
        if (pmf < 0).any():
            raise ValidationError("channel probabilities must be nonnegative")
        rows = pmf.sum(axis=-1)
        if not np.allclose(rows, 1.0, rtol=0, atol=1e-12):
            raise ValidationError("every conditional row must sum to 1")
        pmf.setflags(write=False)
        object.__setattr__(self, "pmf", pmf)

    @property
    def input_sizes(self) -> tuple:
        return self.pmf.shape[:3]

    @property
    def output_size(self) -> int:
        return self.pmf.shape[3]

    def to_dict(self) -> dict:
        return {
            "input_sizes": list(self.input_sizes),
            "output_size": self.output_size,
            "pmf": self.pmf.ravel().tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TableChannel":
        try:
            sizes = [int(s) for s in doc["input_sizes"]]
            out = int(doc["output_size"])
            flat = np.asarray(doc["pmf"], dtype=float)
        except KeyError as exc:
            raise SchemaError(f"channel document lacks field {exc}") from None
        if len(sizes) != 3:
            raise SchemaError("input_sizes must list three alphabet sizes")
        if flat.size != int(np.prod(sizes)) * out:
            raise SchemaError("pmf length does not match the declared alphabet sizes")
        return cls(flat.reshape(*sizes, out))

    @classmethod
    def load(cls, path) -> "TableChannel":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))


@dataclass(frozen=True)
class ExampleChannel:
    """Parallel pair of channels.

    First part: ``y1 = x11 + x21 + x31 + N~_delta``. Second part is in state 1 when
    ``x32 == x12 + x22`` (two independent BSC(delta) links carrying x12 and x22) and
    in state 2 otherwise (both outputs pure fair-coin noise). ``state_rule="x31"``
    tests ``x31`` instead of ``x32``.
    """

    delta: float
    state_rule: str = "x32"

    def __post_init__(self):
        if not 0.0 <= self.delta <= 0.5:
            raise ValidationError(f"delta must lie in [0, 0.5], got {self.delta}")
        if self.state_rule not in STATE_RULES:
            raise ValidationError(f"state_rule must be one of {STATE_RULES}")

    def state_one(self, inp: ChannelInput):
        x3 = inp.x3[1] if self.state_rule == "x32" else inp.x3[0]
        return np.asarray(x3) == (np.asarray(inp.x1[1]) ^ np.asarray(inp.x2[1]))

    def step(self, inp: ChannelInput, rng: np.random.Generator) -> ChannelOutput:
        return example_step(self, inp, rng)

    def pmf(self, inp: ChannelInput) -> np.ndarray:
        return example_pmf(self, inp)

    def table(self) -> TableChannel:
        pmf = np.empty((4, 4, 4, 8))
        for s in product(range(4), repeat=3):
            pmf[s] = example_pmf(self, ChannelInput.from_symbols(*s))
        return TableChannel(pmf)


def example_step(ch: ExampleChannel, inp: ChannelInput, rng: np.random.Generator) -> ChannelOutput:
    """Sample one use (or a vector of independent uses) of the example channel.

    Five noise arrays are always drawn in the order N~, N, N', N_1/2, N'_1/2, so
    stream consumption does not depend on the channel state.
    """
    x11, x12 = (np.asarray(v, dtype=np.uint8) for v in inp.x1)
    x21, x22 = (np.asarray(v, dtype=np.uint8) for v in inp.x2)
    x31, _ = (np.asarray(v, dtype=np.uint8) for v in inp.x3)
    shape = np.broadcast_shapes(x11.shape, x12.shape, x21.shape, x22.shape, x31.shape)
    n_tilde = (rng.random(shape) < ch.delta).astype(np.uint8)
    n_a = (rng.random(shape) < ch.delta).astype(np.uint8)
    n_b = (rng.random(shape) < ch.delta).astype(np.uint8)
    h_a = rng.integers(0, 2, size=shape, dtype=np.uint8)
    h_b = rng.integers(0, 2, size=shape, dtype=np.uint8)
    s1 = ch.state_one(inp)
    y1 = x11 ^ x21 ^ x31 ^ n_tilde
    y21 = np.where(s1, x12 ^ n_a, x12 ^ h_a).astype(np.uint8)
    y22 = np.where(s1, x22 ^ n_b, x22 ^ h_b).astype(np.uint8)
    if y1.ndim == 0:
        return ChannelOutput(int(y1), int(y21), int(y22))
    return ChannelOutput(y1, y21, y22)


def _bsc_row(bit: int, p: float) -> np.ndarray:
    row = np.empty(2)
    row[bit] = 1.0 - p
    row[1 - bit] = p
    return row


def example_pmf(ch: ExampleChannel, inp: ChannelInput) -> np.ndarray:
    """Exact p(y | x) over the 8 outputs (index ``4*y1 + 2*y21 + y22``)."""
    (x11, x12), (x21, x22), (x31, _) = ((int(a), int(b)) for a, b in (inp.x1, inp.x2, inp.x3))
    p = ch.delta if bool(ch.state_one(inp)) else 0.5
    first = _bsc_row(x11 ^ x21 ^ x31, ch.delta)
    return np.einsum("a,b,c->abc", first, _bsc_row(x12, p), _bsc_row(x22, p)).ravel()


def mixture_entropy_closed_form(delta: float, q: float) -> float:
    """H(Y | X1 X2 X3) in bits when the second part is in state 2 with probability q."""
    if not 0.0 <= delta <= 0.5:
        raise ValidationError(f"delta must lie in [0, 0.5], got {delta}")
    if not 0.0 <= q <= 1.0:
        raise ValidationError(f"q must lie in [0, 1], got {q}")
    return (1.0 + 2.0 * (1.0 - q)) * binary_entropy(delta) + 2.0 * q


def mixture_input_model(ch: ExampleChannel, q: float):
    """Uniform inputs except ``x32 = x12 + x22 + B`` with ``B ~ Ber(q)``.

    Returns a factor joint over ``X1, X2, X3, Y`` (symbols as in ``ExampleChannel``).
    Under the default state rule the second part is in state 2 with probability q.
    """
    from .info import Factor, FactorJoint

    if not 0.0 <= q <= 1.0:
        raise ValidationError(f"q must lie in [0, 1], got {q}")
    uniform = np.full(4, 0.25)
    x3 = np.zeros((4, 4, 4))
    for s1, s2, s3 in product(range(4), repeat=3):
        x31, x32 = s3 >> 1, s3 & 1
        flip = x32 != ((s1 & 1) ^ (s2 & 1))
        x3[s1, s2, s3] = 0.5 * (q if flip else 1.0 - q)
    factors = [Factor(("X1",), (), uniform), Factor(("X2",), (), uniform),
               Factor(("X3",), ("X1", "X2"), x3),
               Factor(("Y",), ("X1", "X2", "X3"), ch.table().pmf)]
    return FactorJoint({"X1": 4, "X2": 4, "X3": 4, "Y": 8}, factors)


def mixture_conditional_entropy(delta: float, q: float, state_rule: str = "x32") -> float:
    """Numeric H(Y | X1 X2 X3) of the example channel under ``mixture_input_model``."""
    from .info import conditional_entropy

    model = mixture_input_model(ExampleChannel(delta, state_rule), q)
    return conditional_entropy(model, "Y", ("X1", "X2", "X3"))
