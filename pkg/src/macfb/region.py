"""Rate polytopes: multi-letter feedback bounds, the two-block quasi-linear region,
its Cover-Leung style reduction, and closed-form diagnostics for the example channel.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .channel import TableChannel
from .errors import SchemaError, ValidationError
from .info import (CausalPolicy, Factor, FactorJoint, binary_entropy, causal_entropy,
                   conditional_entropy, entropy, mutual_info, tag, trajectory_model)

USERS = (1, 2, 3)
SUBSETS = tuple(s for r in (1, 2, 3) for s in combinations(USERS, r))
PAIRS = ((1, 2), (1, 3), (2, 3))
FEASIBILITY_TOL = 1e-9
MAX_U = 4


@dataclass(frozen=True)
class Constraint:
    label: str
    coeffs: tuple
    bound: float
    terms: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class RatePolytope:
    """{R : coeffs . R <= bound for every constraint}."""

    constraints: tuple

    def __post_init__(self):
        for c in self.constraints:
            if not np.isfinite(c.bound) or c.bound < 0:
                raise ValidationError(f"constraint {c.label} has bound {c.bound}")

    def __getitem__(self, label: str) -> Constraint:
        for c in self.constraints:
            if c.label == label:
                return c
        raise KeyError(label)

    @property
    def labels(self) -> list:
        return [c.label for c in self.constraints]

    def bounds(self) -> dict:
        return {c.label: c.bound for c in self.constraints}

    def symmetric_max(self) -> float:
        """Largest r with (r, r, r) inside the polytope."""
        return min(c.bound / sum(c.coeffs) for c in self.constraints if sum(c.coeffs) > 0)

    def to_dict(self) -> dict:
        return {"constraints": [
            {"label": c.label, "coeffs": list(c.coeffs), "bound": c.bound,
             "terms": dict(c.terms)} for c in self.constraints]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, doc: dict) -> "RatePolytope":
        try:
            cons = tuple(Constraint(c["label"], tuple(int(a) for a in c["coeffs"]),
                                    float(c["bound"]), dict(c.get("terms", {})))
                         for c in doc["constraints"])
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed polytope document: {exc}") from None
        return cls(cons)

    def diagonal_rows(self, num: int = 11) -> list:
        """Points (r, r, r) for r evenly spaced on [0, r_max]; the last is on the boundary."""
        r_max = self.symmetric_max()
        rows = []
        for r in np.linspace(0.0, r_max, num):
            res = polytope_contains(self, (r, r, r))
            rows.append({"r": float(r), "R1": float(r), "R2": float(r), "R3": float(r),
                         "min_slack": res.slacks[res.tightest], "tightest": res.tightest})
        return rows

    def diagonal_csv(self, num: int = 11) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, ["r", "R1", "R2", "R3", "min_slack", "tightest"], lineterminator="\n")
        w.writeheader()
        for row in self.diagonal_rows(num):
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
        return buf.getvalue()


@dataclass(frozen=True)
class Containment:
    contained: bool
    slacks: dict
    tightest: str


def polytope_contains(poly: RatePolytope, point, tol: float = FEASIBILITY_TOL) -> Containment:
    point = np.asarray(point, dtype=float)
    slacks = {c.label: float(c.bound - np.dot(c.coeffs, point)) for c in poly.constraints}
    tightest = min(slacks, key=slacks.get)
    return Containment(slacks[tightest] >= -tol, slacks, tightest)


def _label(users) -> str:
    return "R" + "+R".join(str(u) for u in users)


def _coeffs(users) -> tuple:
    return tuple(1 if u in users else 0 for u in USERS)


def _nonneg(value: float) -> float:
    return max(0.0, float(value))


# --- closed forms for the example channel ---------------------------------

def corner_point(delta: float) -> tuple:
    """(1 - h(delta)) in every coordinate."""
    if not 0.0 <= delta <= 0.5:
        raise ValidationError(f"delta must lie in [0, 0.5], got {delta}")
    r = 1.0 - binary_entropy(delta)
    return (r, r, r)


def example_sum_bound(delta: float) -> RatePolytope:
    """Outer sum-rate bound 3 (1 - h(delta)) of the example channel (all positions in state 1)."""
    return RatePolytope((Constraint("R1+R2+R3", (1, 1, 1), 3.0 * (1.0 - binary_entropy(delta))),))


def state_fraction_bound(eps: float, c: float, delta: float) -> float:
    """Leading term 3 eps / (2 c (1 - h(delta))) of the bound on |I_c^N| / N.

    The o(eps) correction is omitted; diagnostic use only.
    """
    if c <= 0:
        raise ValidationError("c must be positive")
    gap = 1.0 - binary_entropy(delta)
    if gap <= 0:
        raise ValidationError("delta = 1/2 makes the bound vacuous")
    return 3.0 * eps / (2.0 * c * gap)


# --- multi-letter region for given causal policies -------------------------

def _memoryless_causal_entropy(model, L: int) -> float:
    # H(Y^L || X1 X2 X3) = sum_t H(Y_t | X_t) because p(y_t | y^{t-1}, x^t) = p(y_t | x_t)
    total = 0.0
    for t in range(1, L + 1):
        xs = [tag(f"X{i}", t) for i in USERS]
        total += conditional_entropy(model, tag("Y", t), xs)
    return total


def multiletter_region(channel: TableChannel, policies: Sequence[CausalPolicy], L: int,
              cap: int | None = None, memoryless_shortcut: bool = True) -> RatePolytope:
    """Seven normalised directed-information bounds for the given causal policies.

    ``R_A <= (1/L) I(X_A -> Y || X_{A^c})``. The all-input causal entropy uses the
    channel's memorylessness unless ``memoryless_shortcut`` is False, in which case
    it is read off the full trajectory joint (subject to the tensor cap).
    """
    kwargs = {} if cap is None else {"cap": cap}
    model = trajectory_model(channel, policies, L, **kwargs)
    if memoryless_shortcut:
        h_full = _memoryless_causal_entropy(model, L)
    else:
        h_full = causal_entropy(model.materialize(), "Y", ("X1", "X2", "X3"))
    cons = []
    for users in SUBSETS:
        rest = tuple(f"X{u}" for u in USERS if u not in users)
        keep = [tag(b, t) for t in range(1, L + 1) for b in rest + ("Y",)]
        h_rest = causal_entropy(model.marginal(keep), "Y", rest)
        value = (h_rest - h_full) / L
        cons.append(Constraint(_label(users), _coeffs(users), _nonneg(value),
                               {"directed_info": value}))
    return RatePolytope(tuple(cons))


def mac_region(channel: TableChannel, input_pmfs: Sequence) -> RatePolytope:
    """Classical no-feedback MAC bounds I(X_A; Y | X_{A^c}) for independent inputs."""
    sizes = {"X1": channel.input_sizes[0], "X2": channel.input_sizes[1],
             "X3": channel.input_sizes[2], "Y": channel.output_size}
    factors = [Factor((f"X{i}",), (), np.asarray(input_pmfs[i - 1], dtype=float)) for i in USERS]
    factors.append(Factor(("Y",), ("X1", "X2", "X3"), channel.pmf))
    joint = FactorJoint(sizes, factors)
    cons = []
    for users in SUBSETS:
        xa = [f"X{u}" for u in users]
        rest = [f"X{u}" for u in USERS if u not in users]
        value = mutual_info(joint, xa, "Y", rest)
        cons.append(Constraint(_label(users), _coeffs(users), _nonneg(value), {"mi": value}))
    return RatePolytope(tuple(cons))


# --- two-block quasi-linear region -----------------------------------------

def _xor_table(offset: int = 0) -> np.ndarray:
    tab = np.zeros((2, 2, 2))
    for a in (0, 1):
        for b in (0, 1):
            tab[a, b, a ^ b ^ offset] = 1.0
    return tab


def parity_law(parity: int = 0) -> np.ndarray:
    """Uniform law on the four binary triples with v1 + v2 + v3 = parity."""
    law = np.zeros((2, 2, 2))
    for v in np.ndindex(2, 2, 2):
        if sum(v) % 2 == parity:
            law[v] = 0.25
    return law


V_LAWS = {"even": 0, "odd": 1}


@dataclass(frozen=True, eq=False)
class InputDistribution:
    """One member of the input-distribution family.

    ``x_tables[i][u, t, v, x] = p(x_{i+1} = x | u, t, v)``. The T's are i.i.d.
    uniform bits; the V triple is uniform on the even (default) or odd parity
    triples, which makes every pair independent with uniform marginals.
    """

    channel: TableChannel
    u_pmf: np.ndarray
    x_tables: tuple
    v_law: str = "even"

    def __post_init__(self):
        u = np.array(self.u_pmf, dtype=float)
        if u.ndim != 1 or not 1 <= u.size <= MAX_U:
            raise ValidationError(f"|U| must be between 1 and {MAX_U}")
        if (u < 0).any() or abs(u.sum() - 1.0) > 1e-12:
            raise ValidationError("u_pmf must be a pmf")
        if len(self.x_tables) != 3:
            raise ValidationError("three conditional input tables are required")
        tabs = []
        for i, tab in enumerate(self.x_tables):
            tab = np.array(tab, dtype=float)
            want = (u.size, 2, 2, self.channel.input_sizes[i])
            if tab.shape != want:
                raise SchemaError(f"x table {i + 1} has shape {tab.shape}, expected {want}")
            if (tab < 0).any() or not np.allclose(tab.sum(axis=-1), 1.0, rtol=0, atol=1e-12):
                raise ValidationError(f"x table {i + 1} rows must be pmfs")
            tab.setflags(write=False)
            tabs.append(tab)
        if self.v_law not in V_LAWS:
            raise ValidationError(f"v_law must be one of {sorted(V_LAWS)}")
        u.setflags(write=False)
        object.__setattr__(self, "u_pmf", u)
        object.__setattr__(self, "x_tables", tuple(tabs))

    @property
    def u_size(self) -> int:
        return self.u_pmf.size

    def v_pmf(self) -> np.ndarray:
        return parity_law(V_LAWS[self.v_law])

    def ignores_v(self) -> bool:
        return all(np.array_equal(t[:, :, 0], t[:, :, 1]) for t in self.x_tables)

    def independent_v(self) -> "InputDistribution":
        """Same P with every input table evaluated at v = 0, so inputs ignore V."""
        tabs = tuple(np.repeat(t[:, :, :1], 2, axis=2) for t in self.x_tables)
        return InputDistribution(self.channel, self.u_pmf, tabs, self.v_law)

    def with_dummy_u(self) -> "InputDistribution":
        """Append a zero-mass symbol to U (its input rows copy symbol 0)."""
        u = np.append(self.u_pmf, 0.0)
        tabs = tuple(np.concatenate([t, t[:1]], axis=0) for t in self.x_tables)
        return InputDistribution(self.channel, u, tabs, self.v_law)

    @classmethod
    def random(cls, channel: TableChannel, rng: np.random.Generator, u_size: int = 2,
               v_law: str = "even") -> "InputDistribution":
        u = rng.dirichlet(np.ones(u_size))
        tabs = tuple(rng.dirichlet(np.ones(m), size=(u_size, 2, 2)) for m in channel.input_sizes)
        return cls(channel, u, tabs, v_law)

    def to_dict(self) -> dict:
        return {"u_pmf": self.u_pmf.tolist(),
                "x_tables": [t.ravel().tolist() for t in self.x_tables],
                "v_law": self.v_law}

    @classmethod
    def from_dict(cls, doc: dict, channel: TableChannel) -> "InputDistribution":
        try:
            u = np.asarray(doc["u_pmf"], dtype=float)
            flat = doc["x_tables"]
        except KeyError as exc:
            raise SchemaError(f"distribution document lacks field {exc}") from None
        tabs = []
        for i, tab in enumerate(flat):
            shape = (u.size, 2, 2, channel.input_sizes[i])
            arr = np.asarray(tab, dtype=float)
            if arr.size != int(np.prod(shape)):
                raise SchemaError(f"x table {i + 1} has {arr.size} entries, expected {np.prod(shape)}")
            tabs.append(arr.reshape(shape))
        return cls(channel, u, tuple(tabs), doc.get("v_law", "even"))


@dataclass(frozen=True)
class SourceConfig:
    """Bernoulli biases of the message-letter variables W_1, W_2, W_3."""

    biases: tuple = (0.5, 0.5, 0.5)

    def __post_init__(self):
        if len(self.biases) != 3:
            raise ValidationError("three biases are required")
        for p in self.biases:
            if not 0.0 < p < 1.0:
                raise ValidationError(f"biases must lie in (0, 1), got {p}")

    def h(self, i: int) -> float:
        return binary_entropy(self.biases[i - 1])

    def h_sum(self, i: int, j: int) -> float:
        p, q = self.biases[i - 1], self.biases[j - 1]
        return binary_entropy(p * (1 - q) + q * (1 - p))

    def ratio(self, i: int, j: int) -> float:
        return (self.h(i) + self.h(j)) / self.h_sum(i, j)


def _tilde(name: str) -> str:
    return name + "~"


def _tsum(i: int, j: int) -> str:
    return f"T{i}+T{j}"


def build_two_block_joint(P: InputDistribution) -> FactorJoint:
    """Joint law of the previous block (names ending in ``~``) and the current block.

    The previous block is drawn from P. The current block's ``V_i`` is
    ``T~_j + T~_k`` (plus one for the odd law), and its (U, T, X, Y) are drawn
    from P given those V's. Derived current-block variables ``T{i}+T{j}`` are
    included for every pair.
    """
    ch = P.channel
    sizes, factors = {}, []

    def add(child, parents, table, size):
        sizes[child] = size
        factors.append(Factor((child,), tuple(parents), np.asarray(table, dtype=float)))

    half = np.full(2, 0.5)
    # previous block
    add("U~", (), P.u_pmf, P.u_size)
    for i in USERS:
        add(_tilde(f"T{i}"), (), half, 2)
    for i in USERS:
        sizes[_tilde(f"V{i}")] = 2
    factors.append(Factor(tuple(_tilde(f"V{i}") for i in USERS), (), P.v_pmf()))
    for i in USERS:
        add(_tilde(f"X{i}"), ("U~", _tilde(f"T{i}"), _tilde(f"V{i}")), P.x_tables[i - 1],
            ch.input_sizes[i - 1])
    add("Y~", tuple(_tilde(f"X{i}") for i in USERS), ch.pmf, ch.output_size)
    # coupling
    offset = V_LAWS[P.v_law]
    for i in USERS:
        j, k = (u for u in USERS if u != i)
        add(f"V{i}", (_tilde(f"T{j}"), _tilde(f"T{k}")), _xor_table(offset), 2)
    # current block
    add("U", (), P.u_pmf, P.u_size)
    for i in USERS:
        add(f"T{i}", (), half, 2)
    for i in USERS:
        add(f"X{i}", ("U", f"T{i}", f"V{i}"), P.x_tables[i - 1], ch.input_sizes[i - 1])
    add("Y", tuple(f"X{i}" for i in USERS), ch.pmf, ch.output_size)
    for i, j in PAIRS:
        add(_tsum(i, j), (f"T{i}", f"T{j}"), _xor_table(), 2)
    return FactorJoint(sizes, factors)


def _s(i: int, tilde: bool = False) -> list:
    names = [f"X{i}", f"T{i}", f"V{i}"]
    return [_tilde(n) for n in names] if tilde else names


V_TILDE = ["V1~", "V2~", "V3~"]


def quasi_linear_terms(P: InputDistribution, joint: FactorJoint | None = None) -> dict:
    """Every mutual-information term of the region, keyed by a readable name."""
    J = build_two_block_joint(P) if joint is None else joint
    terms = {"I(U;Y|U~Y~)": mutual_info(J, "U", "Y", ["U~", "Y~"])}
    for users in SUBSETS:
        xa = [f"X{u}" for u in users]
        cond = ["U"] + [v for u in USERS if u not in users for v in _s(u)] + V_TILDE
        terms[f"I(X_A;Y|U S_Ac V~)[{_label(users)}]"] = mutual_info(J, xa, "Y", cond)
    for i, j in PAIRS:
        k = next(u for u in USERS if u not in (i, j))
        key = _label((i, j))
        tij = _tsum(i, j)
        terms[f"I(Ti+Tj;Y|U Tk Xk V~)[{key}]"] = mutual_info(
            J, tij, "Y", ["U", f"T{k}", f"X{k}"] + V_TILDE)
        terms[f"I(Xi~Xj~;Y~|U~ Sk~ V~ Vk)[{key}]"] = mutual_info(
            J, [_tilde(f"X{i}"), _tilde(f"X{j}")], "Y~", ["U~"] + _s(k, True) + V_TILDE + [f"V{k}"])
        terms[f"I(Xi~Xj~;Y|U~ Sk~ V~ U Sk Y~)[{key}]"] = mutual_info(
            J, [_tilde(f"X{i}"), _tilde(f"X{j}")], "Y",
            ["U~"] + _s(k, True) + V_TILDE + ["U"] + _s(k) + ["Y~"])
        terms[f"I(Ti+Tj;Y|U Tk Xk)[{key}]"] = mutual_info(J, tij, "Y", ["U", f"T{k}", f"X{k}"])
    return terms


def _assemble(terms: dict, src: SourceConfig) -> RatePolytope:
    cons = []
    lu = terms["I(U;Y|U~Y~)"]
    for users in SUBSETS:
        a = terms[f"I(X_A;Y|U S_Ac V~)[{_label(users)}]"]
        cons.append(Constraint(_label(users), _coeffs(users), _nonneg(a + lu),
                               {"I(X_A;Y|...)": a, "I(U;Y|U~Y~)": lu}))
    for i, j in PAIRS:
        key = _label((i, j))
        parts = {name: terms[f"{name}[{key}]"] for name in (
            "I(Ti+Tj;Y|U Tk Xk V~)", "I(Xi~Xj~;Y~|U~ Sk~ V~ Vk)", "I(Xi~Xj~;Y|U~ Sk~ V~ U Sk Y~)")}
        cons.append(Constraint(f"{key} (decode)", _coeffs((i, j)), _nonneg(sum(parts.values())), parts))
    for i, j in PAIRS:
        key = _label((i, j))
        base = terms[f"I(Ti+Tj;Y|U Tk Xk)[{key}]"]
        ratio = src.ratio(i, j)
        cons.append(Constraint(f"{key} (sum)", _coeffs((i, j)), _nonneg(ratio * base),
                               {"ratio": ratio, "I(Ti+Tj;Y|U Tk Xk)": base}))
    return RatePolytope(tuple(cons))


def quasi_linear_region(P: InputDistribution, src: SourceConfig | None = None) -> RatePolytope:
    """Thirteen constraints: seven subset bounds, three decoding pair bounds, three sum bounds."""
    return _assemble(quasi_linear_terms(P), src or SourceConfig())


def build_single_block_joint(P: InputDistribution) -> FactorJoint:
    """One block (U, T, X, Y) with inputs that must not depend on V."""
    if not P.ignores_v():
        raise ValidationError("the single-block reduction needs inputs that ignore V")
    ch = P.channel
    sizes, factors = {"U": P.u_size, "Y": ch.output_size}, []
    factors.append(Factor(("U",), (), P.u_pmf))
    for i in USERS:
        sizes[f"T{i}"] = 2
        sizes[f"X{i}"] = ch.input_sizes[i - 1]
        factors.append(Factor((f"T{i}",), (), np.full(2, 0.5)))
        factors.append(Factor((f"X{i}",), ("U", f"T{i}"), P.x_tables[i - 1][:, :, 0]))
    factors.append(Factor(("Y",), ("X1", "X2", "X3"), ch.pmf))
    for i, j in PAIRS:
        sizes[_tsum(i, j)] = 2
        factors.append(Factor((_tsum(i, j),), (f"T{i}", f"T{j}"), _xor_table()))
    return FactorJoint(sizes, factors)


def cl_reduction_terms(P: InputDistribution) -> dict:
    """The region's terms for V-independent inputs, evaluated on a single block.

    With inputs ignoring V the current block is independent of the previous one,
    so ``I(U;Y|U~Y~) = I(U;Y)``, the V~ conditioning drops out, the previous-block
    decoding term becomes ``I(Xi Xj; Y | U Xk Tk, Ti+Tj)`` and the cross-block
    term vanishes.
    """
    J = build_single_block_joint(P)
    terms = {"I(U;Y|U~Y~)": mutual_info(J, "U", "Y")}
    for users in SUBSETS:
        xa = [f"X{u}" for u in users]
        cond = ["U"] + [v for u in USERS if u not in users for v in (f"X{u}", f"T{u}")]
        terms[f"I(X_A;Y|U S_Ac V~)[{_label(users)}]"] = mutual_info(J, xa, "Y", cond)
    for i, j in PAIRS:
        k = next(u for u in USERS if u not in (i, j))
        key = _label((i, j))
        tij = _tsum(i, j)
        base = mutual_info(J, tij, "Y", ["U", f"T{k}", f"X{k}"])
        terms[f"I(Ti+Tj;Y|U Tk Xk V~)[{key}]"] = base
        terms[f"I(Xi~Xj~;Y~|U~ Sk~ V~ Vk)[{key}]"] = mutual_info(
            J, [f"X{i}", f"X{j}"], "Y", ["U", f"X{k}", f"T{k}", tij])
        terms[f"I(Xi~Xj~;Y|U~ Sk~ V~ U Sk Y~)[{key}]"] = 0.0
        terms[f"I(Ti+Tj;Y|U Tk Xk)[{key}]"] = base
    return terms


def cl_reduction_region(P: InputDistribution, src: SourceConfig | None = None) -> RatePolytope:
    return _assemble(cl_reduction_terms(P), src or SourceConfig())


# --- policy presets for the example channel --------------------------------

def iid_policies(channel: TableChannel, pmfs: Sequence, L: int) -> tuple:
    """Feedback-ignoring policies drawing each input i.i.d. from ``pmfs[i]``."""
    return tuple(CausalPolicy.memoryless(p, L, channel.output_size) for p in pmfs)


def example_tracking_policies(L: int) -> tuple:
    """Uniform stage-1 bits; from t = 2 users 1 and 2 repeat their previous first bit
    on their second input and user 3 sends ``y1[t-1] + x31[t-1]`` on its second input.
    """
    fresh = np.full(4, 0.25)

    def repeat(t, xh, yh):
        if t == 1:
            return fresh
        pmf = np.zeros(4)
        b = xh[-1] >> 1
        pmf[[b, 2 + b]] = 0.5
        return pmf

    def track(t, xh, yh):
        if t == 1:
            return fresh
        pmf = np.zeros(4)
        b = (yh[-1] >> 2) ^ (xh[-1] >> 1)
        pmf[[b, 2 + b]] = 0.5
        return pmf

    return (CausalPolicy.from_rule(4, 8, L, repeat), CausalPolicy.from_rule(4, 8, L, repeat),
            CausalPolicy.from_rule(4, 8, L, track))
