import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from logse import experiments as ex
from logse.fem import FunctionSpace, interpolate
from logse.imex import observables
from logse.mesh import uniform_interval
from logse.solutions import TWO_GAUSSON_CASES, GaussonSpec, tanh_product


def test_gausson_eval_examples():
    g = GaussonSpec(d=1, b=1.0, lam=-1.0)
    assert g.a == 1.0
    assert ex.gausson_eval(g, 0.0, 0.0) == 1 + 0j
    for t in (0.1, 1.0, 7.3):
        z = ex.gausson_eval(g, 0.0, t)
        assert z == pytest.approx(np.exp(-1j * t), abs=1e-15)
        assert abs(z) == pytest.approx(1.0, abs=1e-15)


def test_gausson_eval_2d_point():
    g = GaussonSpec(d=2, b=2.0, zeta=(1.0, 0.5), lam=-1.0)
    x, t = (0.3, -0.2), 0.4
    expected = 2.0 * np.exp(1j * (0.3 - 0.1 - (g.a + 1.25) * t) - 0.5 * ((0.3 - 0.8) ** 2 + (-0.2 - 0.4) ** 2))
    assert ex.gausson_eval(g, x, t) == pytest.approx(expected, rel=1e-14)


@settings(max_examples=100, deadline=None)
@given(C=st.floats(1e-3, 1e3), p=st.floats(0.2, 4.0))
def test_fit_slope_synthetic(C, p):
    tau = 0.1 * 2.0 ** -np.arange(1, 6)
    assert ex.fit_slope(tau, C * tau**p) == pytest.approx(p, abs=1e-10)


def test_fit_slope_needs_two_points():
    with pytest.raises(ValueError):
        ex.fit_slope([1.0], [2.0])


def test_table_csv_round_trip():
    rows = [ex.ConvergenceRow(0.1, 1 / 3, np.pi * 1e-5, np.e * 1e-7, 2.0**-40)]
    table = ex.ConvergenceTable("tau", rows)
    lines = table.to_csv().splitlines()
    assert lines[0] == "h,tau,e2,einf,L2"
    parsed = [float(v) for v in lines[1].split(",")]
    assert parsed == [0.1, 1 / 3, np.pi * 1e-5, np.e * 1e-7, 2.0**-40]
    buf = io.StringIO()
    table.to_csv(buf)
    assert buf.getvalue() == table.to_csv()


def test_converge_time_deterministic_and_sorted():
    taus = [0.025, 0.1, 0.05]
    a = ex.converge_time(taus=taus)
    b = ex.converge_time(taus=taus)
    assert a.to_csv() == b.to_csv()
    np.testing.assert_array_equal(a.column("tau"), [0.1, 0.05, 0.025])


def test_converge_time_workers_match_serial():
    taus = [0.1, 0.05]
    assert ex.converge_time(taus=taus, workers=2).to_csv() == ex.converge_time(taus=taus).to_csv()


def test_linear_control_run_first_order():
    plane_wave = GaussonSpec(d=1, b=1.0, zeta=(1.5,), lam=0.0)
    table = ex.converge_time(plane_wave, h=2**-6, taus=[0.1 * 2.0**-j for j in range(1, 5)])
    assert table.slope("e2") == pytest.approx(1.0, abs=0.15)
    e = table.column("e2")
    assert np.all(1.6 < e[:-1] / e[1:]) and np.all(e[:-1] / e[1:] < 2.4)


def test_converge_space_linf_tracks_l2():
    table = ex.converge_space(r=1)
    s = table.slopes
    assert abs(s["einf"] - s["e2"]) < 0.3


def test_combined_2d_mesh_sizes():
    # checked on a tiny final time; the full study runs in the acceptance suite
    table = ex.converge_2d_combined(js=(1, 2), T=0.005)
    np.testing.assert_allclose(table.column("h"), [1 / 24, 1 / 28])
    np.testing.assert_allclose(table.column("tau"), [1 / 24**2, 1 / 28**2])


def test_two_gausson_initial_mass_matches_quadrature():
    spec = TWO_GAUSSON_CASES["i"]
    oracle, _ = quad(lambda x: abs(spec(x)) ** 2, -40, 40, points=[-5, 5], limit=200, epsabs=1e-13)
    V = FunctionSpace(uniform_interval(-40, 40, 1600), 1)
    mass, _ = observables(V, interpolate(V, spec), -1.0)
    assert mass == pytest.approx(oracle, rel=1e-3)
    _, series = ex.dynamics_two_gausson("i", T=1e-3, tau=1e-4, times=[0.0])
    assert series.mass[0] == mass


@pytest.mark.parametrize("case,centers", [("i", (-5, 5)), ("ii", (-2, 2)), ("iii", (-30, 30))])
def test_two_gausson_initial_peaks(case, centers):
    x = np.linspace(-40, 40, 1601)
    peaks = ex.local_maxima(x, np.abs(TWO_GAUSSON_CASES[case](x)))
    np.testing.assert_allclose(peaks, centers, atol=0.05)


def test_case_iii_packets_move_at_twice_zeta():
    snaps, _ = ex.dynamics_two_gausson("iii", T=1.0, tau=1e-3, times=[0.0, 0.5, 1.0])
    x = snaps.coords[:, 0]
    left = [ex.local_maxima(x, np.abs(v)).min() for v in snaps.values]
    right = [ex.local_maxima(x, np.abs(v)).max() for v in snaps.values]
    assert np.polyfit(snaps.times, left, 1)[0] == pytest.approx(4.0, abs=0.2)
    assert np.polyfit(snaps.times, right, 1)[0] == pytest.approx(-4.0, abs=0.2)


def test_snapshot_steps_must_align():
    with pytest.raises(ValueError):
        ex.dynamics_two_gausson("i", T=1e-3, tau=1e-4, times=[0.00015])


def test_tanh_initial_properties():
    snaps, _ = ex.dynamics_2d_tanh(T=0.01, tau=0.01, cell=0.1, times=[0.0])
    xy, u0 = snaps.coords, snaps.at(0.0)
    on_axis = np.isclose(xy[:, 0], 0) | np.isclose(xy[:, 1], 0)
    assert np.all(np.abs(u0[on_axis]) <= 1e-10)
    edge = np.isclose(np.abs(xy).max(axis=1), 10.0)
    assert np.all(np.abs(u0[edge]) <= 1e-10)
    s_star = minimize_scalar(lambda s: -np.tanh(s) * np.exp(-s * s), bounds=(0, 3), method="bounded",
                             options={"xatol": 1e-12}).x
    a = np.abs(u0)
    top = xy[np.argsort(a)[-4:]]
    np.testing.assert_allclose(np.sort(np.abs(top), axis=0), s_star, atol=0.1)
    assert set(map(tuple, np.sign(top).astype(int))) == {(1, 1), (1, -1), (-1, 1), (-1, -1)}
    # node coordinates are mirror images only up to rounding
    assert ex.reflection_asymmetry(xy, a, 0) < 1e-14
    assert ex.reflection_asymmetry(xy, a, 1) < 1e-14


def test_reflection_asymmetry_detects_odd_part():
    xy = np.array([[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
    assert ex.reflection_asymmetry(xy, np.array([1.0, 5.0, 1.0])) == 0.0
    assert ex.reflection_asymmetry(xy, np.array([1.0, 5.0, 3.0])) == 2.0


def test_snapshot_rows_and_writer():
    snaps = ex.Snapshots(np.array([[0.0, 1.0], [2.0, 3.0]]), [0.0], [np.array([1 + 1j, -2j])])
    rows = snaps.rows(0)
    np.testing.assert_allclose(rows, [[0, 1, np.sqrt(2), 1, 1], [2, 3, 2, 0, -2]])
    buf = io.StringIO()
    ex.write_snapshot(buf, rows, "x y |u| Re Im")
    lines = buf.getvalue().splitlines()
    assert lines[0] == "x y |u| Re Im" and len(lines) == 3
    np.testing.assert_array_equal(np.loadtxt(io.StringIO(buf.getvalue()), skiprows=1), rows)
    with pytest.raises(KeyError):
        snaps.at(0.5)


def test_truncation_study_reports():
    reps = ex.truncation_study(taus=(0.02, 0.01), T=0.2, n_cells=16)
    assert [r.tau for r in reps] == [0.02, 0.01]
    assert all(r.satisfied for r in reps)


def test_verify_lemmas_default_passes_and_is_deterministic():
    a = ex.verify_lemmas(seed=7, n_samples=20_000)
    assert a.passed
    assert a.text() == ex.verify_lemmas(seed=7, n_samples=20_000).text()
    names = {r.name for r in a.results}
    assert {"lipschitz_near_zero", "holder_near_zero", "imaginary_near_zero"} <= names
    assert a.text().startswith("generator PCG64\nseed 7\n")


def test_verify_lemmas_rejects_empty():
    with pytest.raises(ValueError):
        ex.verify_lemmas(n_samples=0)


def test_tally_reports_counterexample():
    res = ex._tally("demo", np.array([True, False]), np.array([1 + 0j, 2 + 0j]))
    assert not res.passed and res.violations == 1 and "2" in res.worst
    report = ex.LemmaReport(0, "PCG64", [res])
    assert "FAIL demo" in report.text() and "first counterexample" in report.text()


def test_tanh_product_values():
    assert tanh_product(0.0, 1.0) == 0.0
    assert tanh_product(1.0, 1.0) == pytest.approx(np.tanh(1) ** 2 * np.exp(-2))
