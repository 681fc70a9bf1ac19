import math

import pytest

import eeopt


def test_special_functions():
    assert eeopt.lambert_w0(math.e) == pytest.approx(1.0, rel=1e-15)
    assert eeopt.exp_int(0, 1.0) == pytest.approx(math.exp(-1.0))


def test_static_unit_channel():
    s = eeopt.solve_static([1.0], 1.0, tol=1e-12)
    assert s.lambda_ == pytest.approx(math.exp(-1.0), rel=1e-10)
    assert s.status == "converged"
    assert s.allocation.powers[0] == pytest.approx(math.e - 1.0, rel=1e-8)
    lam, p = eeopt.flat_fading_closed_form(1.0, 1.0)
    assert lam == pytest.approx(s.lambda_, rel=1e-10)


def test_waterfill_allocate():
    a = eeopt.waterfill_allocate([4.0, 1.0], 2.0)
    assert a.powers == pytest.approx([0.25, 0.0])
    assert eeopt.waterfill_allocate([10.0], 0.1, p_max=5.0).powers == [5.0]


def test_constraints_and_errors():
    s = eeopt.solve_static([1.0], 1.0, sum_power=0.5)
    assert s.status == "clamped-min"
    assert s.lambda_ == pytest.approx(2.0 / 3.0)
    with pytest.raises(eeopt.InfeasibleError):
        eeopt.solve_static([1.0, 0.5], 1.0, sum_power=0.1, min_rate=5.0)
    with pytest.raises(eeopt.DomainError):
        eeopt.solve_static([-1.0], 1.0)


def test_solvers_agree():
    cnrs = [4.0, 1.0]
    d = eeopt.solve_static(cnrs, 1.0, tol=1e-12)
    n = eeopt.solve_nested(cnrs, 1.0)
    assert n.ee == pytest.approx(d.ee, rel=1e-8)


def test_ergodic():
    s = eeopt.solve_ergodic_rayleigh(1.0, 1.0)
    assert abs(eeopt.eval_F_rayleigh(1.0, 1.0, s.lambda_)) < 1e-9
    assert s.idle_probability == pytest.approx(1.0 - math.exp(-s.lambda_))
    mc = eeopt.solve_parallel_fading([1.0], 1.0, samples=20000, seed=3)
    assert abs(mc.ee - s.ee) < 4 * mc.ee_std_error
    again = eeopt.solve_parallel_fading([1.0], 1.0, samples=20000, seed=3)
    assert again.ee == mc.ee


def test_mmse():
    assert eeopt.mmse_of("gaussian", 1.0) == pytest.approx(0.5)
    t = eeopt.build_table("4-qam")
    assert t.rate[-1] == pytest.approx(math.log(4.0), rel=1e-9)
    assert eeopt.mmse_of("4-qam", t.inverse(0.25)) == pytest.approx(0.25, rel=1e-6)
    s = eeopt.solve_mmse_ee(["gaussian"], [1.0], 1.0, tol=1e-12)
    assert s.ee == pytest.approx(math.exp(-1.0), rel=1e-8)
    q = eeopt.solve_mmse_ee(["4-qam"], [1.0], 1.0)
    assert q.ee < s.ee


def test_power_model():
    mu, conv = eeopt.generic_mu(200e3, 0.35, 20.0)
    assert mu == pytest.approx(3.5e-5)
    assert conv == pytest.approx(0.35 / math.log(2.0))


def test_config_round_trip():
    text = '{"schema_version": 1, "solver": "static", "channel": {"cnr": [1]}, "mu": 1}'
    out = eeopt.run_config(text)
    header, row = out.strip().split("\n")
    assert header.startswith("group,sweep_value,lambda,ee")
    assert float(row.split(",")[2]) == pytest.approx(math.exp(-1.0), rel=1e-9)
    assert eeopt.run_config(text) == out
    curve = eeopt.tradeoff_config(text)
    assert curve.count("\n") > 10
    with pytest.raises(eeopt.ConfigError):
        eeopt.validate_config('{"schema_version": 1, "solver": "static", "channel": {"cnr": [1]}}')
