import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import lambertw

from hhl_lab import ValidationError, build_params, gate_complexity, lambert_w_minus1, prepare, random_problem
from hhl_lab.bounds import (
    BoundReport,
    bounded_ratio,
    check_eps1_scaling,
    check_eps2_bounds,
    check_improved_error_scaling,
    check_norm_bound,
    check_norm_scaling,
    run_bound_suite,
)

from conftest import diag_problem


def bisect_w(z, lo=-800.0, hi=-1.0):
    """Plain bisection on w e^w = z over the lower branch."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid * math.exp(mid) > z:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_lambert_branch_point_and_known_value():
    assert lambert_w_minus1(-1 / math.e) == -1.0
    assert lambert_w_minus1(-0.1) == pytest.approx(-3.577152, abs=1e-6)
    with pytest.raises(ValidationError):
        lambert_w_minus1(0.0)
    with pytest.raises(ValidationError):
        lambert_w_minus1(-0.5)


@given(st.floats(-1 / math.e, -1e-300, exclude_max=False))
def test_lambert_agrees_with_scipy(z):
    w = lambert_w_minus1(z)
    assert w <= -1
    assert abs(w * math.exp(w) - z) <= 1e-12
    ref = lambertw(z, k=-1).real
    # scipy returns nan at the rounded branch point itself
    if z > -1 / math.e + 1e-9:
        assert w == pytest.approx(ref, rel=1e-10)


def test_gate_complexity_values():
    est = gate_complexity(4, 1024, 8, 8, 0.05)
    assert est.aa_repetitions == 1
    T = -(8 / 0.05**2) * bisect_w(-0.05**2)
    assert est.T == pytest.approx(T, rel=1e-9)
    assert est.query_complexity == pytest.approx(4 * T)
    assert est.gate_complexity == pytest.approx(T * (4 * 10 + math.log2(T) ** 2))
    assert est.n_c == math.ceil(math.log2(T))
    hhl = gate_complexity(4, 1024, 8, 8, 0.05, algorithm="hhl")
    assert hhl.T == pytest.approx(160.0)


def test_gate_complexity_linear_in_s_term():
    a = gate_complexity(2, 64, 4, 6, 0.1)
    b = gate_complexity(4, 64, 4, 6, 0.1)
    m = a.T * a.aa_repetitions
    assert b.gate_complexity - a.gate_complexity == pytest.approx(m * 2 * 6)


@given(st.integers(1, 50), st.floats(1, 100), st.floats(1, 3), st.floats(0.01, 0.6))
def test_gate_complexity_monotone(s, kappa, kp_factor, eps):
    base = gate_complexity(s, 256, kappa, kappa * kp_factor, eps)
    assert base.gate_complexity > 0 and math.isfinite(base.gate_complexity)
    assert gate_complexity(s + 1, 256, kappa, kappa * kp_factor, eps).gate_complexity >= base.gate_complexity
    assert gate_complexity(s, 256, kappa, kappa * kp_factor * 1.5, eps).gate_complexity >= base.gate_complexity
    assert gate_complexity(s, 256, kappa, kappa * kp_factor, eps * 0.9).gate_complexity >= base.gate_complexity


@pytest.mark.parametrize(
    "args", [(0, 4, 2, 2, 0.1), (1, 1, 2, 2, 0.1), (1, 4, 0.5, 2, 0.1), (1, 4, 2, 1, 0.1), (1, 4, 2, 2, 1.5)]
)
def test_gate_complexity_domain(args):
    with pytest.raises(ValidationError):
        gate_complexity(*args)


def test_bounded_ratio_proxy():
    assert bounded_ratio([1, 3, 2, 2.5, 5.9])
    assert not bounded_ratio([1, 1, 1, 2, 4])
    assert bounded_ratio([0, 0, 0])
    assert not bounded_ratio([1, float("inf")])
    assert not bounded_ratio([])


def test_eps1_scaling_examples():
    uni = check_eps1_scaling(0.35, math.pi, range(4, 13))
    assert uni.holds and len(uni.ratio) == 9
    hhl = check_eps1_scaling(0.35, math.pi, range(4, 13), clock_prep="hhl")
    assert hhl.ratio[-1] < hhl.ratio[0] / 100
    # lambda t T = 2 pi * 2^(n-3) is resonant for every n >= 4
    res = check_eps1_scaling(2 * math.pi / (math.pi * 8), math.pi, range(4, 9))
    np.testing.assert_allclose(res.value, 0, atol=1e-12)
    with pytest.raises(ValidationError):
        check_eps1_scaling(0.3, 1.0, [5, 4])


def test_eps2_bounds():
    t, T = math.pi, 2**11
    lam = 301 * math.pi / (t * T)
    c = check_eps2_bounds(lam, t, 11)
    assert c.scale[0] == pytest.approx(1 / (2 * math.pi) ** 2)
    assert c.holds
    res = check_eps2_bounds(2 * 300 * math.pi / (t * T), t, 11)
    assert res.scale[0] == pytest.approx(0, abs=1e-20) and res.value[0] == pytest.approx(0, abs=1e-12)
    assert res.holds


def test_eps2_lower_term_shrinks_with_sqrt_T_kappa_prime():
    t = math.pi
    lows = []
    for n_c in (6, 8, 10):
        T = 2**n_c
        p = build_params(n_c, t, kappa_prime=math.sqrt(T))
        lows.append(check_eps2_bounds(101 * math.pi / (t * 4096), t, n_c, k_min=p.k_min).inputs["kappa_prime"])
    ratios = [(2 * kp / (t * 2**n)) ** 2 * t**2 * 2**n / 4 for kp, n in zip(lows, (6, 8, 10))]
    np.testing.assert_allclose(ratios, 1, rtol=0.3)


def test_improved_vs_variant_scaling():
    pp = prepare(random_problem(7, 2, index=2))
    t = 8 * math.pi / 5
    imp = check_improved_error_scaling(pp, t, range(5, 12))
    var = check_improved_error_scaling(pp, t, range(5, 12), postselect="ancilla")
    assert imp.name == "improved_error_scaling" and imp.holds
    assert var.name == "variant_error_scaling"
    assert max(var.ratio) > 5 * max(imp.ratio)


def test_resonant_problem_bounds(resonant_lambda):
    pp = diag_problem([resonant_lambda, 0.9], [1, 0])
    c = check_norm_bound(pp, build_params(5, math.pi))
    assert c.value[0] == pytest.approx(0, abs=1e-12)


def test_norm_bound_grows_as_lambda_min_shrinks():
    t = 8 * math.pi / 5
    p = build_params(11, t)
    vals = []
    for lam in (0.4, 0.1, 0.02):
        # keep sin^2(lambda t T/2) fixed at 1 so only lambda_min moves
        m = round((lam * t * p.T / math.pi - 1) / 2)
        lam_ar = (2 * m + 1) * math.pi / (t * p.T)
        vals.append(check_norm_bound(diag_problem([lam_ar, 1.0], [0.6, 0.8]), p).value[0])
    assert vals[0] < vals[1] < vals[2]


def test_norm_scaling_holds():
    pp = prepare(random_problem(7, 2, index=0))
    assert check_norm_scaling(pp, 8 * math.pi / 5, range(4, 13)).holds


def test_report_json(tmp_path):
    probs = [prepare(random_problem(7, 2, index=i)) for i in range(2)]
    rep = run_bound_suite(probs, 8 * math.pi / 5, range(4, 9))
    data = json.loads(rep.to_json())
    assert {"name", "inputs", "value", "scale", "ratio", "holds"} <= set(data[0])
    names = {d["name"] for d in data}
    assert names == {"eps1_scaling", "improved_error_scaling", "variant_error_scaling", "norm_scaling", "eps2_lower_bound"}
    for d in data:
        if isinstance(d["inputs"].get("T"), list):
            assert d["inputs"]["T"] == sorted(set(d["inputs"]["T"]))
    rep.write(tmp_path / "b.json")
    assert json.loads((tmp_path / "b.json").read_text()) == data
    assert isinstance(rep.holds, dict)
    assert BoundReport().to_json() == "[]"
