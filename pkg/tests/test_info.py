from __future__ import annotations

from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import entropy as sp_entropy

from conftest import h2
from macfb.channel import ExampleChannel, TableChannel
from macfb.errors import ResourceLimitError, SchemaError, UnknownVariableError, ValidationError
from macfb.info import (CausalPolicy, Factor, FactorJoint, JointPmf, build_trajectory_pmf,
                        causal_entropy, conditional_entropy, directed_info,
                        directed_info_causally_conditioned, entropy, mutual_info, tag,
                        time_series, trajectory_model)


def H(probs) -> float:
    return float(sp_entropy(np.ravel(probs), base=2))


def random_joint(names, sizes, seed):
    r = np.random.default_rng(seed)
    p = r.dirichlet(np.ones(int(np.prod(sizes)))).reshape(sizes)
    return JointPmf(tuple(names), p)


def bsc_channel(eps: float) -> TableChannel:
    """Three binary inputs, binary output y = x1 ^ x2 ^ x3 through BSC(eps)."""
    pmf = np.empty((2, 2, 2, 2))
    for a, b, c in product(range(2), repeat=3):
        s = a ^ b ^ c
        pmf[a, b, c, s], pmf[a, b, c, 1 - s] = 1 - eps, eps
    return TableChannel(pmf)


def test_basic_values():
    u = JointPmf(("X",), [0.5, 0.5])
    assert entropy(u, "X") == pytest.approx(1.0, abs=1e-15)
    ind = JointPmf(("X", "Y"), np.outer([0.3, 0.7], [0.2, 0.8]))
    assert abs(mutual_info(ind, "X", "Y")) < 1e-12
    p = np.array([[0.45, 0.05], [0.05, 0.45]])
    bsc = JointPmf(("X", "Y"), p)
    assert mutual_info(bsc, "X", "Y") == pytest.approx(1 - h2(0.1), abs=1e-12)


def test_zero_probability_convention():
    p = JointPmf(("X", "Y"), [[0.5, 0.0], [0.0, 0.5]])
    assert entropy(p, ("X", "Y")) == pytest.approx(1.0)
    assert conditional_entropy(p, "Y", "X") == pytest.approx(0.0, abs=1e-15)


def test_unknown_variable_and_schema_errors():
    p = JointPmf(("X",), [0.5, 0.5])
    with pytest.raises(UnknownVariableError):
        entropy(p, "Z")
    with pytest.raises(SchemaError):
        JointPmf(("X", "X"), np.full((2, 2), 0.25))
    with pytest.raises(ValidationError):
        JointPmf(("X",), [0.5, 0.6])


@given(st.integers(0, 10_000))
def test_shannon_identities(seed):
    p = random_joint(("A", "B", "C"), (2, 3, 2), seed)
    dense = p.probs
    assert entropy(p, ("A", "B", "C")) == pytest.approx(H(dense), abs=1e-12)
    assert entropy(p, "A") == pytest.approx(H(dense.sum(axis=(1, 2))), abs=1e-12)
    assert conditional_entropy(p, "B", "A") == pytest.approx(
        entropy(p, ("A", "B")) - entropy(p, "A"), abs=1e-12)
    assert mutual_info(p, "A", "B") == pytest.approx(mutual_info(p, "B", "A"), abs=1e-12)
    for args in (("A", "B"), ("A", "B", "C"), (("A", "B"), "C")):
        assert mutual_info(p, *args) >= -1e-12
    assert p.marginal(("C", "A")).probs.sum() == pytest.approx(1.0, abs=1e-12)
    # chain rule for mutual information
    assert mutual_info(p, "A", ("B", "C")) == pytest.approx(
        mutual_info(p, "A", "B") + mutual_info(p, "A", "C", "B"), abs=1e-12)


def test_joint_json_roundtrip(tmp_path):
    p = random_joint(("X", "Y"), (2, 3), 1)
    doc = p.to_dict()
    assert doc["axes"] == [{"name": "X", "size": 2}, {"name": "Y", "size": 3}]
    back = JointPmf.from_dict(doc)
    assert back.names == p.names and np.array_equal(back.probs, p.probs)
    with pytest.raises(SchemaError):
        JointPmf.from_dict({"axes": [{"name": "X", "size": 3}], "probs": [0.5, 0.5]})


def two_step_joint(seed):
    names = [tag("X", 1), tag("Y", 1), tag("X", 2), tag("Y", 2)]
    return random_joint(names, (2, 2, 2, 2), seed)


def causal_oracle(p):
    """H(Y1|X1) + H(Y2|Y1 X1 X2) from the dense tensor (axes X1 Y1 X2 Y2)."""
    d = p.probs
    h1 = H(d.sum(axis=(2, 3))) - H(d.sum(axis=(1, 2, 3)))
    h2_ = H(d) - H(d.sum(axis=3))
    return h1 + h2_


@given(st.integers(0, 10_000))
def test_causal_entropy_against_oracle(seed):
    p = two_step_joint(seed)
    assert causal_entropy(p, "Y", "X") == pytest.approx(causal_oracle(p), abs=1e-12)
    # empty conditioning gives H(Y^n)
    assert causal_entropy(p, "Y") == pytest.approx(entropy(p, [tag("Y", 1), tag("Y", 2)]), abs=1e-12)
    di = directed_info(p, "X")
    assert di + causal_entropy(p, "Y", "X") == pytest.approx(causal_entropy(p, "Y"), abs=1e-12)
    mi = mutual_info(p, [tag("X", 1), tag("X", 2)], [tag("Y", 1), tag("Y", 2)])
    assert -1e-12 <= di <= mi + 1e-12


def test_causal_entropy_edge_cases():
    one = random_joint([tag("X", 1), tag("Y", 1)], (2, 3), 5)
    assert causal_entropy(one, "Y", "X") == pytest.approx(
        conditional_entropy(one, tag("Y", 1), tag("X", 1)), abs=1e-15)
    assert directed_info(one, "X") == pytest.approx(mutual_info(one, tag("X", 1), tag("Y", 1)), abs=1e-12)
    copy = np.zeros((2, 2, 2, 2))
    for a, b in product(range(2), repeat=2):
        copy[a, a, b, b] = 0.25
    det = JointPmf((tag("X", 1), tag("Y", 1), tag("X", 2), tag("Y", 2)), copy)
    assert causal_entropy(det, "Y", "X") == pytest.approx(0.0, abs=1e-15)
    ind = JointPmf((tag("X", 1), tag("Y", 1), tag("X", 2), tag("Y", 2)), np.full((2,) * 4, 1 / 16))
    assert abs(directed_info(ind, "X")) < 1e-12


def test_time_tag_errors():
    gap = JointPmf((tag("X", 1), tag("Y", 1), tag("Y", 3)), np.full((2, 2, 2), 1 / 8))
    with pytest.raises(SchemaError):
        time_series(gap, "Y")
    untagged = JointPmf(("X", "Y"), np.full((2, 2), 0.25))
    with pytest.raises(SchemaError):
        causal_entropy(untagged, "Y", "X")


def test_causally_conditioned_variant():
    names = [f"{b}@{t}" for t in (1, 2) for b in ("X", "Z", "Y")]
    p = random_joint(names, (2,) * 6, 3)
    got = directed_info_causally_conditioned(p, "X", "Z", normalized=True)
    want = (causal_entropy(p, "Y", "Z") - causal_entropy(p, "Y", ("X", "Z"))) / 2
    assert got == pytest.approx(want, abs=1e-12)


def brute_trajectory(channel, policies, L):
    """Enumerate every trajectory and multiply policy and channel probabilities."""
    m, o = channel.input_sizes[0], channel.output_size
    shape = []
    for _ in range(L):
        shape += [m, m, m, o]
    out = np.zeros(shape)
    for traj in product(*(range(s) for s in shape)):
        xs = [traj[4 * t:4 * t + 3] for t in range(L)]
        ys = [traj[4 * t + 3] for t in range(L)]
        prob = 1.0
        for t in range(L):
            for i, pol in enumerate(policies):
                hist = tuple(x[i] for x in xs[:t]) + tuple(ys[:t])
                prob *= pol.tables[t][hist + (xs[t][i],)]
            prob *= channel.pmf[xs[t] + (ys[t],)]
        out[traj] = prob
    return out


def test_trajectory_against_enumeration():
    ch = bsc_channel(0.2)
    rng = np.random.default_rng(2)

    def noisy_copy(t, xh, yh):
        return [0.5, 0.5] if t == 1 else [0.8, 0.2] if yh[-1] == 0 else [0.3, 0.7]

    pols = (CausalPolicy.memoryless([0.4, 0.6], 2, 2),
            CausalPolicy.from_rule(2, 2, 2, noisy_copy),
            CausalPolicy.from_rule(2, 2, 2, lambda t, xh, yh: rng.dirichlet([1, 1])))
    names = [tag(b, t) for t in (1, 2) for b in ("X1", "X2", "X3", "Y")]
    got = build_trajectory_pmf(ch, pols, 2, keep=names)
    assert np.allclose(got.probs, brute_trajectory(ch, pols, 2), atol=1e-15)


def test_trajectory_l1_is_product():
    ch = bsc_channel(0.1)
    pm = ([0.3, 0.7], [0.5, 0.5], [0.9, 0.1])
    pols = tuple(CausalPolicy.memoryless(p, 1, 2) for p in pm)
    p = build_trajectory_pmf(ch, pols, 1, keep=["X1@1", "X2@1", "X3@1", "Y@1"])
    want = np.einsum("a,b,c,abcy->abcy", *pm, ch.pmf)
    assert np.allclose(p.probs, want, atol=1e-15)


def test_copy_feedback_policy_concentrates_mass():
    ch = bsc_channel(0.0)
    copy = CausalPolicy.from_rule(2, 2, 2, lambda t, xh, yh: 0 if t == 1 else yh[-1])
    pols = (CausalPolicy.memoryless([0.5, 0.5], 2, 2), CausalPolicy.memoryless([1.0, 0.0], 2, 2), copy)
    p = build_trajectory_pmf(ch, pols, 2)
    assert p.probs.sum() == pytest.approx(1.0, abs=1e-12)
    m = p.marginal(["Y@1", "X3@2"]).probs
    assert m[0, 1] == 0 and m[1, 0] == 0


@pytest.mark.parametrize("L", [1, 2, 3])
def test_iid_policies_single_letter(L):
    ch = ExampleChannel(0.1).table()
    pm = [np.random.default_rng(i).dirichlet(np.ones(4)) for i in range(3)]
    pols = tuple(CausalPolicy.memoryless(p, L, 8) for p in pm)
    model = trajectory_model(ch, pols, L)
    single = mutual_info(model, ["X1@1", "X2@1", "X3@1"], "Y@1")
    # Y-only causal entropy is H(Y^L); the all-input term uses memorylessness
    h_y = causal_entropy(model.marginal([tag("Y", t) for t in range(1, L + 1)]), "Y")
    h_cond = sum(conditional_entropy(model, tag("Y", t), [tag(f"X{i}", t) for i in (1, 2, 3)])
                 for t in range(1, L + 1))
    assert (h_y - h_cond) / L == pytest.approx(single, abs=1e-9)


def test_factor_joint_cap_and_checks():
    f = [Factor(("A",), (), np.full(4, 0.25)), Factor(("B",), (), np.full(4, 0.25))]
    fj = FactorJoint({"A": 4, "B": 4}, f, cap=8)
    assert fj.marginal("A").probs.sum() == pytest.approx(1.0)
    with pytest.raises(ResourceLimitError):
        fj.marginal(("A", "B"))
    with pytest.raises(SchemaError):
        FactorJoint({"A": 4, "B": 4}, f[:1])
    with pytest.raises(SchemaError):
        FactorJoint({"A": 3}, f[:1])


def test_policy_validation_and_json():
    with pytest.raises(ValidationError):
        CausalPolicy(2, 2, (np.array([0.5, 0.6]),))
    with pytest.raises(SchemaError):
        CausalPolicy(2, 2, (np.full((2, 2), 0.5),))
    pol = CausalPolicy.from_rule(2, 3, 2, lambda t, xh, yh: [0.25, 0.75] if t == 1 else yh[-1] % 2)
    back = CausalPolicy.from_dict(pol.to_dict())
    assert all(np.array_equal(a, b) for a, b in zip(pol.tables, back.tables))
