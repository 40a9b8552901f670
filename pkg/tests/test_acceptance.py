"""End-to-end acceptance checks, one per shipped guarantee.

Each test prints a single PASS/FAIL line (bypassing capture) so a plain
pytest run shows the scorecard, and then asserts, so a failure is also a
red test.
"""

import math
import sys
import time

import numpy as np
import pytest
from scipy.interpolate import CubicSpline

from cylscatter import (
    FamilyParameters,
    GaussianTestFunction,
    I_transform,
    build_family_profile,
    build_linear_model,
    capital_phi,
    mean_value_point,
    pair_correlation,
    parameter_scan,
    phi_second_at_x,
    psi_leading,
    quantum_classical_check,
    ramanujan_ratio,
    rational_coefficient,
    renormalized_rotation,
    scattering_matrix,
)


@pytest.fixture
def report(capfd):
    """Scorecard printer that bypasses pytest's capture."""

    def _report(num, name, ok, detail=""):
        line = f"ACCEPTANCE {num:02d} {name}: {'PASS' if ok else 'FAIL'}"
        if detail:
            line += f"  [{detail}]"
        with capfd.disabled():
            print(line, file=sys.stderr, flush=True)

    return _report


@pytest.fixture(scope="module")
def coef():
    return rational_coefficient(0.5)


@pytest.fixture(scope="module")
def family(coef):
    return build_family_profile(FamilyParameters(alpha=-0.5, beta=0.1), coef)


def test_criterion_01_linear_golden(report):
    t0 = time.time()
    worst = 0.0
    for t in (1.0,):
        prof = build_linear_model(t)
        for x in np.arange(0.1, 0.95, 0.1):
            worst = max(worst, abs(psi_leading(prof, float(x)) - (-t * x / 2.0)))
    elapsed = time.time() - t0
    ok = worst < 1e-8 and elapsed < 1.0
    report(1, "linear-model golden value", ok, f"err={worst:.2e} t={elapsed:.2f}s")
    assert ok


def test_criterion_02_weight_integral(report):
    t0 = time.time()
    worst = max(
        abs(I_transform(lambda y: 1.0, x) + math.pi / 2.0) for x in (0.1, 1.0, 10.0)
    )
    elapsed = time.time() - t0
    ok = worst < 1e-10 and elapsed < 1.0
    report(2, "weight-integral constant", ok, f"err={worst:.2e} t={elapsed:.2f}s")
    assert ok


def test_criterion_03_wkb_exact_consistency(family, report):
    t0 = time.time()
    bounds = []
    for lam in (50.0, 100.0, 200.0):
        exact = scattering_matrix(family, lam, 0.1)
        wkb = scattering_matrix(family, lam, 0.1, backend="wkb")
        bounds.append(lam * float(np.max(np.abs(exact.deltas - wkb.deltas))))
    elapsed = time.time() - t0
    spread = max(bounds) / min(bounds)
    ok = max(bounds) < 10.0 and spread < 2.0 and elapsed < 120.0
    report(
        3,
        "WKB-exact consistency",
        ok,
        f"lam*res={['%.3f' % b for b in bounds]} spread={spread:.2f} t={elapsed:.0f}s",
    )
    assert ok


def test_criterion_04_poisson_summation(family, report):
    t0 = time.time()
    worst = 0.0
    lin = build_linear_model(1.0)
    for prof in (lin, family):
        tab = scattering_matrix(prof, 100.0, 0.1, backend="wkb")
        _, deltas = tab.positive()
        direct = pair_correlation(deltas, 100.0, 0.1, method="direct").value
        fourier = pair_correlation(deltas, 100.0, 0.1, method="fourier").value
        worst = max(worst, abs(direct - fourier))
    elapsed = time.time() - t0
    ok = worst < 1e-6 and elapsed < 30.0
    report(4, "Poisson-summation equality", ok, f"diff={worst:.2e} t={elapsed:.1f}s")
    assert ok


def test_criterion_05_poisson_limit_trend(coef, report):
    t0 = time.time()
    rep = parameter_scan(coef, lams=(100.0, 200.0, 400.0, 800.0), n_samples=64)
    e2 = [r.mean_sq_off for r in rep.rows]
    ks = [r.k_statistic for r in rep.rows[1:]]  # top three lambdas
    med = [r.median_dev for r in rep.rows]
    elapsed = time.time() - t0
    decreasing = all(a > b for a, b in zip(e2, e2[1:]))
    k_stable = max(ks) / min(ks) < 3.0
    ok = decreasing and k_stable and med[-1] < med[0] and elapsed < 600.0
    report(
        5,
        "Poisson-limit trend",
        ok,
        f"E2={['%.4f' % v for v in e2]} Kspread={max(ks) / min(ks):.2f} "
        f"med={med[0]:.3f}->{med[-1]:.3f} t={elapsed:.1f}s",
    )
    assert ok


def test_criterion_06_linear_slice_no_decay(coef, report):
    t0 = time.time()
    rep = parameter_scan(coef, lams=(100.0, 800.0), n_samples=64, beta_zero=True)
    ratio = rep.rows[1].mean_abs_off / rep.rows[0].mean_abs_off
    elapsed = time.time() - t0
    ok = ratio >= 0.5 and elapsed < 60.0
    report(6, "beta=0 non-decay", ok, f"ratio={ratio:.3f} t={elapsed:.1f}s")
    assert ok


def test_criterion_07_divisor_moment(report):
    t0 = time.time()
    r6 = ramanujan_ratio(10**6)
    r5 = ramanujan_ratio(10**5)
    elapsed = time.time() - t0
    ok = 0.05 <= r6 <= 0.3 and abs(r6 - r5) < 0.05 and elapsed < 10.0
    report(7, "divisor second moment", ok, f"r6={r6:.4f} r5={r5:.4f} t={elapsed:.1f}s")
    assert ok


def test_criterion_08_mean_value_bounds(coef, report):
    lam = 100.0
    xs = np.linspace(0.1, 0.9, 200)
    phi_vals = np.array([capital_phi(coef, float(x)) for x in xs])
    spl = CubicSpline(xs, phi_vals)
    dspl = spl.derivative(1)
    phi2 = np.abs([phi_second_at_x(coef, float(x)) for x in np.linspace(0.1, 0.9, 40)])
    big_c = float(np.max(phi2) / np.min(phi2))

    ms = np.linspace(50.0, 150.0, 20)
    hs = np.linspace(1.0, 12.0, 20)
    dm = 0.25
    worst_lo, worst_hi = np.inf, -np.inf
    for m in ms:
        for h in hs:
            xi_p = mean_value_point(spl, dspl, m + dm, h, lam).xi
            xi_m = mean_value_point(spl, dspl, m - dm, h, lam).xi
            slope = (xi_p - xi_m) / (2.0 * dm)
            worst_lo = min(worst_lo, slope)
            worst_hi = max(worst_hi, slope)
    in_bounds = 1.0 / big_c < worst_lo and worst_hi < big_c

    quad_ok = True
    for m, h in ((60.0, 5.0), (120.0, -9.0)):
        res = mean_value_point(lambda x: x * x, lambda x: 2.0 * x, m, h, lam)
        quad_ok &= abs(res.xi - m / 2.0) < 1e-10
    ok = in_bounds and quad_ok
    report(
        8,
        "mean-value-point bounds",
        ok,
        f"dXi/dm in [{worst_lo:.3f},{worst_hi:.3f}] C={big_c:.2f}",
    )
    assert ok


def test_criterion_09_rotation(family, report):
    t0 = time.time()
    sups = [quantum_classical_check(family, lam, n_grid=12).sup for lam in (100.0, 200.0, 400.0)]
    decay_ok = sups[1] < 0.75 * sups[0] and sups[2] < 0.75 * sups[1]
    lin = build_linear_model(1.0)
    rot = [renormalized_rotation(lin, x) for x in np.linspace(0.1, 0.9, 9)]
    const_ok = max(rot) - min(rot) < 1e-6
    elapsed = time.time() - t0
    ok = decay_ok and const_ok
    report(
        9,
        "quantum-classical rotation",
        ok,
        f"sups={['%.1e' % s for s in sups]} spread={max(rot) - min(rot):.1e} t={elapsed:.0f}s",
    )
    assert ok


def test_criterion_10_convexity(report):
    ok = True
    worst = 0.0
    for rho in (0.3, 2.0 / 3.0):
        coef = rational_coefficient(rho)
        xs = np.linspace(0.1, 0.9, 17)
        vals = np.array([phi_second_at_x(coef, float(x)) for x in xs])
        ok &= bool(np.all(vals < 0.0) or np.all(vals > 0.0))
        h = 1e-3
        for x in (0.2, 0.5, 0.8):
            st = [capital_phi(coef, x + j * h) for j in (-2, -1, 0, 1, 2)]
            fd = (-st[0] + 16 * st[1] - 30 * st[2] + 16 * st[3] - st[4]) / (12 * h * h)
            worst = max(worst, abs(phi_second_at_x(coef, x) - fd))
    ok &= worst < 1e-5
    report(10, "convexity certification", ok, f"fd_err={worst:.2e}")
    assert ok
