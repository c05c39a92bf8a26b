from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import h2
from macfb.channel import ExampleChannel, TableChannel
from macfb.errors import SchemaError, ValidationError
from macfb.info import mutual_info
from macfb.region import (Constraint, RatePolytope, InputDistribution, SourceConfig, build_two_block_joint,
                          cl_reduction_region, corner_point, example_sum_bound,
                          example_tracking_policies, iid_policies, state_fraction_bound,
                          mac_region, polytope_contains, multiletter_region, quasi_linear_region,
                          quasi_linear_terms)
from oracles import DenseOracle, dense_two_block, quasi_linear_term_specs

EX = ExampleChannel(0.1).table()


def small_channel(seed=1):
    return TableChannel(np.random.default_rng(seed).dirichlet(np.ones(2), size=(2, 2, 2)))


def null_channel():
    return TableChannel(np.full((2, 2, 2, 3), 1 / 3))


def uniform(m):
    return np.full(m, 1.0 / m)


def test_corner_point():
    assert corner_point(0.0) == (1.0, 1.0, 1.0)
    assert corner_point(0.5) == (0.0, 0.0, 0.0)
    for r in corner_point(0.1):
        assert abs(r - (1 - h2(0.1))) < 1e-12
        assert abs(r - 0.53100) < 1e-5


def test_containment():
    poly = example_sum_bound(0.1)
    assert polytope_contains(poly, (0, 0, 0)).contained
    s = poly["R1+R2+R3"].bound
    res = polytope_contains(poly, (s / 3 + 0.01, s / 3, s / 3))
    assert not res.contained and res.tightest == "R1+R2+R3"
    at = polytope_contains(poly, corner_point(0.1))
    assert at.contained and abs(at.slacks["R1+R2+R3"]) < 1e-9


def test_polytope_validation_and_json():
    with pytest.raises(ValidationError):
        RatePolytope((Constraint("R1", (1, 0, 0), -0.1),))
    with pytest.raises(ValidationError):
        RatePolytope((Constraint("R1", (1, 0, 0), float("inf")),))
    poly = mac_region(EX, [uniform(4)] * 3)
    back = RatePolytope.from_dict(json.loads(poly.to_json()))
    assert back.bounds() == poly.bounds()
    with pytest.raises(SchemaError):
        RatePolytope.from_dict({"constraints": [{"label": "R1"}]})


def test_diagonal_csv():
    poly = mac_region(EX, [uniform(4)] * 3)
    lines = poly.diagonal_csv(5).splitlines()
    assert lines[0] == "r,R1,R2,R3,min_slack,tightest"
    assert len(lines) == 6
    last = poly.diagonal_rows(5)[-1]
    assert abs(last["min_slack"]) < 1e-12
    assert last["r"] == pytest.approx(poly.symmetric_max())


def test_state_fraction_bound():
    assert state_fraction_bound(0.01, 0.25, 0.1) == pytest.approx(0.03 / (0.5 * (1 - h2(0.1))))
    with pytest.raises(ValidationError):
        state_fraction_bound(0.01, 0.0, 0.1)
    with pytest.raises(ValidationError):
        state_fraction_bound(0.01, 0.2, 0.5)


def test_rl_l1_equals_mac():
    pm = [np.random.default_rng(i).dirichlet(np.ones(4)) for i in range(3)]
    a = multiletter_region(EX, iid_policies(EX, pm, 1), 1)
    b = mac_region(EX, pm)
    for lab in a.labels:
        assert abs(a[lab].bound - b[lab].bound) < 1e-12
    # uniform inputs: sum bound is 2 - 2 h(0.1) (3 bits out, 1 + 2h lost to noise)
    u = multiletter_region(EX, iid_policies(EX, [uniform(4)] * 3, 1), 1)
    assert u["R1+R2+R3"].bound == pytest.approx(2 - 2 * h2(0.1), abs=1e-12)


def test_rl_degenerate_channel():
    ch = null_channel()
    poly = multiletter_region(ch, iid_policies(ch, [uniform(2)] * 3, 2), 2)
    assert all(abs(b) < 1e-12 for b in poly.bounds().values())


def test_rl_tracking_beats_single_letter():
    one = multiletter_region(EX, iid_policies(EX, [uniform(4)] * 3, 1), 1)["R1+R2+R3"].bound
    two = multiletter_region(EX, example_tracking_policies(2), 2)["R1+R2+R3"].bound
    assert two > one + 0.1
    # hand value: block 1 has 3 bits with y-noise 1+2h(0.1); block 2 keeps state 1 w.p. 0.9
    h = h2(0.1)
    assert two == pytest.approx((2 - 2 * h + 3 - 2.8 * h - 0.2) / 2, abs=1e-9)


def test_rl_shortcut_matches_full_joint():
    pol = example_tracking_policies(2)
    a = multiletter_region(EX, pol, 2)
    b = multiletter_region(EX, pol, 2, memoryless_shortcut=False)
    for lab in a.labels:
        assert abs(a[lab].bound - b[lab].bound) < 1e-12


def test_two_block_v_law_and_marginals():
    P = InputDistribution.random(EX, np.random.default_rng(0), u_size=2)
    J = build_two_block_joint(P)
    v = J.marginal(("V1", "V2", "V3")).probs
    for idx in np.ndindex(2, 2, 2):
        assert v[idx] == pytest.approx(0.25 if sum(idx) % 2 == 0 else 0.0, abs=1e-15)
    for a, b in (("V1", "V2"), ("V1", "V3"), ("V2", "V3")):
        assert abs(mutual_info(J, a, b)) < 1e-12
    # previous block is distributed as P
    m = J.marginal(("U~", "T1~", "V1~", "X1~")).probs
    want = np.einsum("u,t,v,utvx->utvx", P.u_pmf, [0.5, 0.5], [0.5, 0.5], P.x_tables[0])
    assert np.allclose(m, want, atol=1e-15)
    # current block and previous block are conditionally independent given V
    assert abs(mutual_info(J, ("U~", "X1~", "Y~"), ("U", "X1", "T2", "Y"), ("V1", "V2", "V3"))) < 1e-12


def test_odd_v_law():
    P = InputDistribution.random(EX, np.random.default_rng(0), u_size=1, v_law="odd")
    v = build_two_block_joint(P).marginal(("V1", "V2", "V3")).probs
    assert v[1, 1, 1] == pytest.approx(0.25) and v[0, 0, 0] == 0


def test_quasi_linear_terms_small_brute_force():
    ch = small_channel()
    specs = quasi_linear_term_specs()
    for seed in range(3):
        P = InputDistribution.random(ch, np.random.default_rng(seed), u_size=1)
        oracle = DenseOracle(dense_two_block(ch.pmf, P.x_tables))
        terms = quasi_linear_terms(P)
        assert set(terms) == set(specs)
        for key, (a, b, c) in specs.items():
            assert abs(terms[key] - oracle.mi(a, b, c)) < 1e-9, key


def test_quasi_linear_shape_and_null_channel():
    P = InputDistribution.random(EX, np.random.default_rng(2))
    poly = quasi_linear_region(P)
    assert len(poly.constraints) == 13
    assert "R1+R2 (decode)" in poly.labels and "R2+R3 (sum)" in poly.labels
    assert all(b >= 0 for b in poly.bounds().values())
    nul = quasi_linear_region(InputDistribution.random(null_channel(), np.random.default_rng(2)))
    assert all(abs(b) < 1e-12 for b in nul.bounds().values())


@given(st.integers(0, 2 ** 32))
def test_independent_v_matches_reduction(seed):
    P = InputDistribution.random(small_channel(seed % 7), np.random.default_rng(seed), u_size=2).independent_v()
    a, b = quasi_linear_region(P), cl_reduction_region(P)
    for lab in a.labels:
        assert abs(a[lab].bound - b[lab].bound) < 1e-9


def test_reduction_needs_v_free_inputs():
    P = InputDistribution.random(EX, np.random.default_rng(5))
    assert not P.ignores_v()
    with pytest.raises(ValidationError):
        cl_reduction_region(P)


def test_dummy_u_symbol_changes_nothing():
    P = InputDistribution.random(small_channel(), np.random.default_rng(9), u_size=2)
    a, b = quasi_linear_region(P), quasi_linear_region(P.with_dummy_u())
    for lab in a.labels:
        assert abs(a[lab].bound - b[lab].bound) < 1e-12


def test_source_config():
    src = SourceConfig()
    assert src.ratio(1, 2) == pytest.approx(2.0)
    assert SourceConfig((0.5, 0.2, 0.5)).ratio(1, 2) == pytest.approx((1 + h2(0.2)) / 1.0)
    with pytest.raises(ValidationError):
        SourceConfig((0.5, 0.0, 0.5))
    with pytest.raises(ValidationError):
        SourceConfig((0.5, 0.5))


def test_scriptp_validation_and_json():
    P = InputDistribution.random(EX, np.random.default_rng(1), u_size=3)
    back = InputDistribution.from_dict(json.loads(json.dumps(P.to_dict())), EX)
    assert all(np.array_equal(a, b) for a, b in zip(P.x_tables, back.x_tables))
    with pytest.raises(ValidationError):
        InputDistribution(EX, np.full(5, 0.2), P.x_tables)
    with pytest.raises(SchemaError):
        InputDistribution(EX, P.u_pmf, (P.x_tables[0][:, :, :, :2],) + P.x_tables[1:])
    with pytest.raises(ValidationError):
        InputDistribution(EX, P.u_pmf, P.x_tables, v_law="mixed")
