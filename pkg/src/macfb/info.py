"""Exact Shannon measures over finite-alphabet joint distributions.

Two joint representations share one interface (``names``, ``sizes``, ``marginal``):

* ``JointPmf``: a dense probability tensor with named axes.
* ``FactorJoint``: a Bayesian-network style product of conditional tables that is
  never expanded; marginals are computed by contracting only the factors that
  matter for the requested variables.

Multi-letter variables use time-tagged axis names ``"<base>@<t>"`` with ``t``
running from 1.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ResourceLimitError, SchemaError, UnknownVariableError, ValidationError

MASS_TOL = 1e-12
DERIVED_MASS_TOL = 1e-9
DEFAULT_TENSOR_CAP = 2 ** 24


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"probability out of range: {p}")
    if p in (0.0, 1.0):
        return 0.0
    return float(-p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p))


def entropy_of(probs: np.ndarray) -> float:
    """Entropy in bits of a probability array of any shape (0 log 0 = 0)."""
    p = np.asarray(probs, dtype=float).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def _as_names(vars_) -> tuple:
    if vars_ is None:
        return ()
    if isinstance(vars_, str):
        return (vars_,)
    return tuple(vars_)


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Dense joint pmf; ``probs`` has one axis per entry of ``names``."""

    names: tuple
    probs: np.ndarray

    def __post_init__(self):
        names = tuple(self.names)
        probs = np.array(self.probs, dtype=float)
        if len(set(names)) != len(names):
            raise SchemaError(f"axis names must be unique: {names}")
        if probs.ndim != len(names):
            raise SchemaError(f"{len(names)} names for a {probs.ndim}-axis tensor")
        if (probs < -MASS_TOL).any():
            raise ValidationError("probabilities must be nonnegative")
        total = probs.sum()
        if abs(total - 1.0) > MASS_TOL:
            raise ValidationError(f"total mass {total!r} differs from 1")
        probs.setflags(write=False)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "probs", probs)

    @property
    def sizes(self) -> dict:
        return dict(zip(self.names, self.probs.shape))

    def _axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownVariableError(name) from None

    def marginal(self, vars_) -> "JointPmf":
        keep = _as_names(vars_)
        if len(set(keep)) != len(keep):
            raise SchemaError(f"repeated variable in {keep}")
        axes = [self._axis(v) for v in keep]
        drop = tuple(i for i in range(len(self.names)) if i not in axes)
        reduced = self.probs.sum(axis=drop) if drop else self.probs
        remaining = [i for i in range(len(self.names)) if i in axes]
        order = [remaining.index(a) for a in axes]
        return JointPmf(keep, np.transpose(reduced, order) if keep else np.asarray(reduced))

    def to_dict(self) -> dict:
        return {
            "axes": [{"name": n, "size": s} for n, s in zip(self.names, self.probs.shape)],
            "probs": self.probs.ravel().tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "JointPmf":
        try:
            axes = doc["axes"]
            names = tuple(a["name"] for a in axes)
            shape = tuple(int(a["size"]) for a in axes)
            flat = np.asarray(doc["probs"], dtype=float)
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed joint pmf document: {exc}") from None
        if flat.size != int(np.prod(shape, dtype=np.int64)):
            raise SchemaError("probs length does not match the declared axes")
        return cls(names, flat.reshape(shape))

    @classmethod
    def load(cls, path) -> "JointPmf":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class Factor:
    """Conditional table ``p(children | parents)``; axes are parents then children."""

    children: tuple
    parents: tuple
    table: np.ndarray

    @property
    def names(self) -> tuple:
        return self.parents + self.children


@dataclass(eq=False)
class FactorJoint:
    """Joint distribution given as a product of conditional tables.

    ``marginal`` prunes factors whose children are neither requested nor needed
    by another retained factor (they sum to one), then contracts the rest with
    ``np.einsum``. Results are memoised per variable tuple.
    """

    sizes: dict
    factors: list
    cap: int = DEFAULT_TENSOR_CAP
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        seen = set()
        for f in self.factors:
            for name, dim in zip(f.names, f.table.shape):
                if name not in self.sizes:
                    raise SchemaError(f"factor uses undeclared variable {name!r}")
                if self.sizes[name] != dim:
                    raise SchemaError(f"size mismatch for {name!r}: {dim} vs {self.sizes[name]}")
            for c in f.children:
                if c in seen:
                    raise SchemaError(f"variable {c!r} has two defining factors")
                seen.add(c)
        missing = set(self.sizes) - seen
        if missing:
            raise SchemaError(f"variables without a defining factor: {sorted(missing)}")

    @property
    def names(self) -> tuple:
        return tuple(self.sizes)

    def _relevant(self, keep: Iterable[str]) -> list:
        needed = set(keep)
        kept = list(self.factors)
        changed = True
        while changed:
            changed = False
            used = set(needed)
            for f in kept:
                used.update(f.parents)
            pruned = [f for f in kept if any(c in used for c in f.children)]
            if len(pruned) != len(kept):
                kept, changed = pruned, True
        return kept

    def marginal(self, vars_) -> JointPmf:
        keep = _as_names(vars_)
        for v in keep:
            if v not in self.sizes:
                raise UnknownVariableError(v)
        if len(set(keep)) != len(keep):
            raise SchemaError(f"repeated variable in {keep}")
        if keep in self._cache:
            return self._cache[keep]
        size = int(np.prod([self.sizes[v] for v in keep], dtype=np.int64))
        if size > self.cap:
            raise ResourceLimitError(f"marginal over {keep} has {size} entries (cap {self.cap})")
        factors = self._relevant(keep)
        labels = {v: i for i, v in enumerate(self.sizes)}
        if len(labels) > 52:
            raise ResourceLimitError("einsum supports at most 52 distinct variables")
        if factors:
            ops = []
            for f in factors:
                ops.extend([f.table, [labels[v] for v in f.names]])
            probs = np.einsum(*ops, [labels[v] for v in keep], optimize="greedy")
        else:
            probs = np.ones(())
        total = probs.sum()
        if abs(total - 1.0) > DERIVED_MASS_TOL:
            raise ValidationError(f"factor product has mass {total!r}; a factor is not normalised")
        # long contractions drift by a few ulps per factor; renormalise before validation
        out = JointPmf(keep, probs / total)
        self._cache[keep] = out
        return out

    def materialize(self) -> JointPmf:
        return self.marginal(self.names)


def entropy(p, vars_) -> float:
    """H(vars) in bits."""
    names = _as_names(vars_)
    if not names:
        return 0.0
    return entropy_of(p.marginal(names).probs)


def _union(*groups) -> tuple:
    out = []
    for g in groups:
        for v in _as_names(g):
            if v not in out:
                out.append(v)
    return tuple(out)


def conditional_entropy(p, a, b=()) -> float:
    """H(A | B) = H(A B) - H(B)."""
    return entropy(p, _union(a, b)) - entropy(p, _union(b))


def mutual_info(p, a, b, c=()) -> float:
    """I(A; B | C) = H(A C) + H(B C) - H(A B C) - H(C)."""
    return (entropy(p, _union(a, c)) + entropy(p, _union(b, c))
            - entropy(p, _union(a, b, c)) - entropy(p, _union(c)))


def tag(base: str, t: int) -> str:
    return f"{base}@{t}"


def time_series(p, base: str) -> list:
    """Names ``base@1 .. base@n`` present in ``p``; gaps or absence raise SchemaError."""
    times = []
    for name in p.names:
        stem, sep, t = name.rpartition("@")
        if sep and stem == base and t.isdigit():
            times.append(int(t))
    if not times:
        raise SchemaError(f"no time-tagged axes for {base!r}")
    times.sort()
    if times != list(range(1, len(times) + 1)):
        raise SchemaError(f"time tags for {base!r} are not 1..n: {times}")
    return [tag(base, t) for t in times]


def _series_block(p, y: str, xs: Sequence[str]) -> tuple:
    ys = time_series(p, y)
    n = len(ys)
    xss = []
    for x in xs:
        s = time_series(p, x)
        if len(s) != n:
            raise SchemaError(f"{x!r} has {len(s)} time steps, {y!r} has {n}")
        xss.append(s)
    return ys, xss


def causal_entropy(p, y: str = "Y", x: Sequence[str] = ()) -> float:
    """H(Y^n || X^n) = sum_k H(Y_k | Y^{k-1}, X^k), X possibly several bases."""
    ys, xss = _series_block(p, y, _as_names(x))
    total = 0.0
    for k in range(1, len(ys) + 1):
        cond = ys[:k - 1] + [s[j] for s in xss for j in range(k)]
        total += conditional_entropy(p, ys[k - 1], cond)
    return total


def directed_info(p, x: Sequence[str], y: str = "Y", z: Sequence[str] = (),
                  normalized: bool = False) -> float:
    """I(X^n -> Y^n || Z^n) = H(Y^n || Z^n) - H(Y^n || X^n Z^n).

    With ``normalized`` the value is divided by ``n``.
    """
    x, z = _as_names(x), _as_names(z)
    value = causal_entropy(p, y, z) - causal_entropy(p, y, x + z)
    if normalized:
        value /= len(time_series(p, y))
    return value


def directed_info_causally_conditioned(p, x, z, y: str = "Y", normalized: bool = False) -> float:
    return directed_info(p, x, y, z, normalized)


# --- causal input policies and multi-letter trajectories ------------------

@dataclass(frozen=True, eq=False)
class CausalPolicy:
    """p(x_t | x^{t-1}, y^{t-1}) for one user.

    ``tables[t-1]`` has axes ``(x_1..x_{t-1}, y_1..y_{t-1}, x_t)``.
    """

    input_size: int
    output_size: int
    tables: tuple

    def __post_init__(self):
        tables = tuple(np.array(t, dtype=float) for t in self.tables)
        for t, tab in enumerate(tables):
            want = (self.input_size,) * t + (self.output_size,) * t + (self.input_size,)
            if tab.shape != want:
                raise SchemaError(f"table {t + 1} has shape {tab.shape}, expected {want}")
            if (tab < 0).any() or not np.allclose(tab.sum(axis=-1), 1.0, rtol=0, atol=MASS_TOL):
                raise ValidationError(f"table {t + 1} rows must be pmfs")
            tab.setflags(write=False)
        object.__setattr__(self, "tables", tables)

    @property
    def L(self) -> int:
        return len(self.tables)

    @classmethod
    def memoryless(cls, pmf, L: int, output_size: int) -> "CausalPolicy":
        """The same input pmf at every time, ignoring all history."""
        pmf = np.asarray(pmf, dtype=float)
        m = pmf.size
        tables = [np.broadcast_to(pmf, (m,) * t + (output_size,) * t + (m,)).copy()
                  for t in range(L)]
        return cls(m, output_size, tuple(tables))

    @classmethod
    def from_rule(cls, input_size: int, output_size: int, L: int,
                  rule: Callable[[int, tuple, tuple], object]) -> "CausalPolicy":
        """Tabulate ``rule(t, x_hist, y_hist)`` for t = 1..L.

        The rule returns a pmf over inputs or an int (deterministic input).
        """
        tables = []
        for t in range(1, L + 1):
            tab = np.zeros((input_size,) * (t - 1) + (output_size,) * (t - 1) + (input_size,))
            for xh in product(range(input_size), repeat=t - 1):
                for yh in product(range(output_size), repeat=t - 1):
                    out = rule(t, xh, yh)
                    if isinstance(out, (int, np.integer)):
                        tab[xh + yh + (int(out),)] = 1.0
                    else:
                        tab[xh + yh] = np.asarray(out, dtype=float)
            tables.append(tab)
        return cls(input_size, output_size, tuple(tables))

    def to_dict(self) -> dict:
        return {
            "input_size": self.input_size,
            "output_size": self.output_size,
            "tables": [t.ravel().tolist() for t in self.tables],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CausalPolicy":
        try:
            m, o = int(doc["input_size"]), int(doc["output_size"])
            flat = doc["tables"]
        except KeyError as exc:
            raise SchemaError(f"policy document lacks field {exc}") from None
        tables = []
        for t, tab in enumerate(flat):
            shape = (m,) * t + (o,) * t + (m,)
            arr = np.asarray(tab, dtype=float)
            if arr.size != int(np.prod(shape)):
                raise SchemaError(f"table {t + 1} has {arr.size} entries, expected {np.prod(shape)}")
            tables.append(arr.reshape(shape))
        return cls(m, o, tuple(tables))


def trajectory_model(channel, policies: Sequence[CausalPolicy], L: int,
                     cap: int = DEFAULT_TENSOR_CAP) -> FactorJoint:
    """Factor form of the joint law of (X_1^L, X_2^L, X_3^L, Y^L).

    Axes are ``X1@t``, ``X2@t``, ``X3@t`` and ``Y@t``.
    """
    if len(policies) != 3:
        raise ValidationError("exactly three policies are required")
    if L < 1:
        raise ValidationError("L must be at least 1")
    sizes_in = channel.input_sizes
    for i, pol in enumerate(policies):
        if pol.input_size != sizes_in[i] or pol.output_size != channel.output_size:
            raise SchemaError(f"policy {i + 1} alphabets do not match the channel")
        if pol.L < L:
            raise SchemaError(f"policy {i + 1} defines {pol.L} steps, need {L}")
    sizes, factors = {}, []
    for t in range(1, L + 1):
        ys = [tag("Y", s) for s in range(1, t)]
        for i, pol in enumerate(policies, start=1):
            xi = tag(f"X{i}", t)
            sizes[xi] = sizes_in[i - 1]
            parents = tuple(tag(f"X{i}", s) for s in range(1, t)) + tuple(ys)
            factors.append(Factor((xi,), parents, pol.tables[t - 1]))
        sizes[tag("Y", t)] = channel.output_size
        xs = tuple(tag(f"X{i}", t) for i in (1, 2, 3))
        factors.append(Factor((tag("Y", t),), xs, channel.pmf))
    return FactorJoint(sizes, factors, cap)


def build_trajectory_pmf(channel, policies: Sequence[CausalPolicy], L: int, keep=None,
                         cap: int = DEFAULT_TENSOR_CAP) -> JointPmf:
    """Dense joint (or the marginal over ``keep``) of an L-step feedback trajectory."""
    model = trajectory_model(channel, policies, L, cap)
    return model.marginal(model.names if keep is None else keep)
