"""Exact semiclassical phase shifts from the reduced radial equation.

Solves u'' = q(r) u with q = (V(r; x, h) - 1)/h^2, where

    V(r; x, h) = x^2/a(r)^2 - h^2 (2 a'' a - a'^2) / (4 a^2).

The conic tip makes r = 0 an irregular singular point, so the recessive
solution is carried through the classically forbidden region as a
log-derivative (Riccati variable), then propagated by Numerov through
the allowed region and matched to A e^{ikr} + B e^{-ikr} at two radii,
with Richardson extrapolation in 1/R removing the O(1/R) tail error.

Calibration, frozen by the linear-model golden test: with
theta = arg(B/A) the phase shift is

    delta = 1/2 - theta/(2 pi)   (mod 1),

and the integer branch is anchored to the WKB value
lambda * psi(x) + 1/4, which it approaches at rate O(1/lambda).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.integrate import solve_ivp

from .errors import BranchError, ConfigurationError, DomainError, IntegrationError
from .profiles import FamilyProfile, LinearProfile, SurfaceProfile
from .wkb import linear_phase_function, profile_psi_spline

__all__ = [
    "ExactPhaseResult",
    "PhaseShiftTable",
    "solve_phase_shift",
    "delta_exact",
    "scattering_matrix",
    "window_indices",
]


# ---------------------------------------------------------------------------
# numba kernels: profile evaluation and Numerov sweep
# ---------------------------------------------------------------------------


@njit(cache=True)
def _y_eval(r, mode, t, xs, coefs, y_end, slope_end):
    if mode == 0:
        return r / t
    n = xs.shape[0]
    if r >= xs[n - 1]:
        return y_end + slope_end * (r - xs[n - 1])
    i = np.searchsorted(xs, r) - 1
    if i < 0:
        i = 0
    if i > n - 2:
        i = n - 2
    d = r - xs[i]
    return ((coefs[0, i] * d + coefs[1, i]) * d + coefs[2, i]) * d + coefs[3, i]


@njit(cache=True)
def _q_eval(r, x, h, mode, t, alpha, beta, rho, xs, coefs, y_end, slope_end):
    y = _y_eval(r, mode, t, xs, coefs, y_end, slope_end)
    if mode == 0:
        yp = 1.0 / t
        ypp = 0.0
    else:
        den = 1.0 + rho * y * y
        fval = 1.0 / den
        fp = -2.0 * rho * y / (den * den)
        F = -2.0 * alpha - beta * fval
        yp = 1.0 / F
        ypp = beta * fp * yp * yp * yp
    one = 1.0 + y * y
    sq = math.sqrt(one)
    a = y / sq
    ap = yp / (one * sq)
    app = ypp / (one * sq) - 3.0 * y * yp * yp / (one * one * sq)
    a2 = a * a
    curv = (2.0 * app * a - ap * ap) / (4.0 * a2)
    return (x * x / a2 - h * h * curv - 1.0) / (h * h)


@njit(cache=True)
def _numerov_advance(
    rbase, u0, u1, dr, nsteps, x, h, mode, t, alpha, beta, rho, xs, coefs, y_end, slope_end
):
    """Advance u'' = q u by ``nsteps`` Numerov steps from (u(rbase), u(rbase+dr)).

    Returns u at the last three grid points rbase + (nsteps-2, nsteps-1,
    nsteps) * dr, so the caller can form a derivative at the middle one.
    """
    d2 = dr * dr / 12.0
    up = u0
    uc = u1
    qp = _q_eval(rbase, x, h, mode, t, alpha, beta, rho, xs, coefs, y_end, slope_end)
    qc = _q_eval(rbase + dr, x, h, mode, t, alpha, beta, rho, xs, coefs, y_end, slope_end)
    fp = 1.0 - d2 * qp
    fc = 1.0 - d2 * qc
    upp = up
    for n in range(1, nsteps):
        rn = rbase + (n + 1) * dr
        qn = _q_eval(rn, x, h, mode, t, alpha, beta, rho, xs, coefs, y_end, slope_end)
        fn = 1.0 - d2 * qn
        un = ((12.0 - 10.0 * fc) * uc - fp * up) / fn
        if abs(un) > 1e250:
            up *= 1e-250
            uc *= 1e-250
            un *= 1e-250
        upp = up
        up = uc
        uc = un
        fp = fc
        fc = fn
    return upp, up, uc


def _kernel_args(profile: SurfaceProfile):
    if isinstance(profile, LinearProfile):
        return (
            0,
            profile.t,
            0.0,
            0.0,
            0.0,
            np.zeros(2),
            np.zeros((4, 1)),
            0.0,
            0.0,
        )
    if isinstance(profile, FamilyProfile) and profile.coefficient.kind == "rational":
        interp = profile._interp
        return (
            1,
            1.0,
            profile.params.alpha,
            profile.params.beta,
            float(profile.coefficient.rho_fam),
            np.ascontiguousarray(interp.x, dtype=float),
            np.ascontiguousarray(interp.c, dtype=float),
            profile._y_end,
            profile._slope_end,
        )
    raise DomainError(
        "exact backend supports the linear model and rational-coefficient families"
    )


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExactPhaseResult:
    """One (x, h) solve: scattering phase theta = arg(B/A) and bookkeeping."""

    x: float
    h: float
    theta: float  # extrapolated phase, one mod-2pi representative
    delta_fraction: float  # 1/2 - theta/(2 pi), reduced to [0, 1)
    matching_radius: float
    est_error: float  # magnitude of the Richardson correction, delta units
    reflection_modulus: float
    branch_index: int = 0


def _barrier_start(profile, x, h, rt, action_target):
    """Radius below the turning point with >= action_target of WKB decay."""
    log_span = 0.5
    for _ in range(40):
        rs = rt * np.exp(np.linspace(-log_span, 0.0, 160))
        q = np.asarray(profile.reduced_q(rs, x, h), dtype=float)
        act = float(np.trapezoid(np.sqrt(np.maximum(q, 0.0)), rs))
        if act >= action_target or log_span > 60.0:
            return float(rs[0])
        log_span *= 1.7
    return float(rt * math.exp(-60.0))


def solve_phase_shift(
    profile: SurfaceProfile,
    x: float,
    h: float,
    r_match: float = 60.0,
    steps_per_wavelength: int = 40,
    barrier_action: float = 28.0,
) -> ExactPhaseResult:
    """Integrate the reduced equation and extract the scattering phase.

    The log-derivative is carried from deep under the barrier to the
    turning point (recessive data, initialisation error suppressed by
    exp(-2 * barrier_action)); Numerov takes over through the allowed
    region; the phase is matched at R and 2R and extrapolated in 1/R.
    """
    if not 0.0 < x < 1.0:
        raise DomainError(f"solve_phase_shift requires 0 < x < 1, got {x}")
    if not 0.0 < h <= 1.0:
        raise DomainError(f"solve_phase_shift requires 0 < h <= 1, got {h}")
    args = _kernel_args(profile)
    mode, t, alpha, beta, rho, xs, coefs, y_end, slope_end = args

    rt = profile.r_turn(x)
    R1 = max(r_match, 4.0 * rt)
    if rt > 0.45 * R1:
        raise ConfigurationError(
            f"turning point r_t = {rt:.2f} too close to matching radius {R1:.2f}"
        )

    # ---- forbidden region: Riccati for w = u'/u --------------------------
    r0 = _barrier_start(profile, x, h, rt, barrier_action)
    q0 = float(profile.reduced_q(r0, x, h))
    dq = r0 * 1e-6
    qp0 = (
        float(profile.reduced_q(r0 + dq, x, h)) - float(profile.reduced_q(r0 - dq, x, h))
    ) / (2.0 * dq)
    w0 = math.sqrt(q0) - qp0 / (4.0 * q0)  # WKB log-derivative of the growing branch

    sol = solve_ivp(
        lambda r, w: float(profile.reduced_q(r, x, h)) - w[0] * w[0],
        (r0, rt),
        [w0],
        method="LSODA",
        rtol=1e-10,
        atol=1e-8,
    )
    if not sol.success:
        raise IntegrationError(f"Riccati integration failed: {sol.message}")
    wt = float(sol.y[0, -1])

    # ---- allowed region: Numerov -----------------------------------------
    k_inf = math.sqrt(1.0 - x * x) / h
    dr = 2.0 * math.pi / (steps_per_wavelength * k_inf)
    n1 = max(int(math.ceil((R1 - rt) / dr)), 8)
    dr = (R1 - rt) / n1
    n2 = max(int(round(R1 / dr)), 8)
    R2 = R1 + n2 * dr

    # start values at rt, rt + dr via RK4 substeps on (u, u')
    u, du = 1.0, wt
    nsub = 8
    hh = dr / nsub
    rr = rt

    def qq(r):
        return _q_eval(r, x, h, mode, t, alpha, beta, rho, xs, coefs, y_end, slope_end)

    for _ in range(nsub):
        k1u, k1d = du, qq(rr) * u
        k2u, k2d = du + 0.5 * hh * k1d, qq(rr + 0.5 * hh) * (u + 0.5 * hh * k1u)
        k3u, k3d = du + 0.5 * hh * k2d, qq(rr + 0.5 * hh) * (u + 0.5 * hh * k2u)
        k4u, k4d = du + hh * k3d, qq(rr + hh) * (u + hh * k3u)
        u = u + hh / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        du = du + hh / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
        rr += hh
    u0, u1 = 1.0, u

    um, uc, up = _numerov_advance(
        rt, u0, u1, dr, n1 + 1, x, h, mode, t, alpha, beta, rho, xs, coefs, y_end, slope_end
    )
    theta1 = _phase_at(qq, R1, um, uc, up, dr, k_inf)
    um2, uc2, up2 = _numerov_advance(
        R1, uc, up, dr, n2 + 1, x, h, mode, t, alpha, beta, rho, xs, coefs, y_end, slope_end
    )
    theta2 = _phase_at(qq, R2, um2, uc2, up2, dr, k_inf)

    # Richardson in 1/R: theta(R) = theta_inf + c/R.  The raw difference is
    # only known mod 2 pi; unwrap it with the analytic tail coefficient
    # c = k x^2 C_W / (1 - x^2), C_W = lim r^2 W(r), which can push
    # theta2 - theta1 past pi at large x.
    c_w = float(1e12 * profile.W(1e6))
    d_est = k_inf * x * x * c_w / (1.0 - x * x) * (1.0 / R2 - 1.0 / R1)
    d = (theta2 - theta1 + math.pi) % (2.0 * math.pi) - math.pi
    d += 2.0 * math.pi * round((d_est - d) / (2.0 * math.pi))
    theta_inf = theta1 + d * R2 / (R2 - R1)
    delta_fraction = (0.5 - theta_inf / (2.0 * math.pi)) % 1.0
    return ExactPhaseResult(
        x=x,
        h=h,
        theta=theta_inf,
        delta_fraction=delta_fraction,
        matching_radius=R1,
        est_error=abs(d) / (2.0 * math.pi),
        reflection_modulus=1.0,  # real u forces B = conj(A); asserted in tests
    )


def _phase_at(qq, rm, um, uc, up, dr, k_inf):
    """arg(B/A) at radius rm from u at rm - dr, rm, rm + dr."""
    qm = qq(rm - dr)
    q0 = qq(rm)
    qp = qq(rm + dr)
    du = (up - um - dr * dr / 6.0 * (qp - qm) * uc) / (2.0 * dr * (1.0 + dr * dr * q0 / 6.0))
    # u = A e^{ikr} + B e^{-ikr}; theta = 2 arg(u + i u'/k) + 2 k r  (mod 2 pi)
    return 2.0 * cmath.phase(complex(uc, du / k_inf)) + 2.0 * k_inf * rm


# ---------------------------------------------------------------------------
# phase-shift tables
# ---------------------------------------------------------------------------


def _default_spw(lam: float) -> int:
    # Numerov phase error grows like dr^4 k^5 R; sqrt(lambda) step scaling
    # keeps the residual against the semiclassical phase decaying as 1/lambda.
    return max(40, int(40.0 * math.sqrt(lam / 50.0)))


def window_indices(lam: float, eps: float) -> np.ndarray:
    """Positive integers k with eps < k/lambda < 1 - eps."""
    k_lo = int(math.floor(eps * lam)) + 1
    k_hi = int(math.ceil((1.0 - eps) * lam)) - 1
    if k_hi < k_lo:
        return np.empty(0, dtype=int)
    return np.arange(k_lo, k_hi + 1, dtype=int)


def delta_exact(
    profile: SurfaceProfile,
    lam: float,
    n: int,
    eps: float = 0.05,
    psi_ref=None,
    branch_tol: float = 0.4,
    **solver_opts,
) -> float:
    """Exact phase shift delta_n(lambda), branch anchored to the WKB value.

    delta_n = delta_{-n} by construction (only |n| enters).  The global
    integer branch is harmless for the mod-1 statistics; anchoring keeps
    the WKB comparison meaningful.
    """
    x = abs(n) / lam
    if not eps < x < 1.0 - eps:
        raise DomainError(f"|n|/lambda = {x:.4f} outside window ({eps}, {1 - eps})")
    solver_opts.setdefault("steps_per_wavelength", _default_spw(lam))
    res = solve_phase_shift(profile, x, 1.0 / lam, **solver_opts)
    if psi_ref is None:
        from .wkb import psi_leading

        psi_x = psi_leading(profile, x)
    else:
        psi_x = float(psi_ref(x))
    anchor = lam * psi_x + 0.25
    delta = res.delta_fraction + round(anchor - res.delta_fraction)
    if abs(delta - anchor) > branch_tol:
        raise BranchError(
            f"phase-shift branch ambiguous at lambda={lam}, n={n}: "
            f"exact-WKB residual {delta - anchor:+.3f} exceeds {branch_tol}"
        )
    return float(delta)


@dataclass
class PhaseShiftTable:
    """Phase shifts delta_k for all k in the symmetric window at one lambda."""

    lam: float
    eps: float
    backend: str  # "exact" | "wkb" | "model"
    ks: np.ndarray  # sorted, both signs
    deltas: np.ndarray
    est_errors: np.ndarray

    @property
    def n_indices(self) -> int:
        return len(self.ks)

    def positive(self):
        mask = self.ks > 0
        return self.ks[mask], self.deltas[mask]

    def write_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["lambda", "k", "delta", "backend", "est_error"])
            for k, d, e in zip(self.ks, self.deltas, self.est_errors):
                w.writerow(
                    [f"{self.lam:.17g}", int(k), f"{d:.17g}", self.backend, f"{e:.17g}"]
                )


def scattering_matrix(
    profile: SurfaceProfile,
    lam: float,
    eps: float,
    backend: str = "exact",
    phase=None,
    **solver_opts,
) -> PhaseShiftTable:
    """Table of delta_k over the symmetric index window at energy lambda^2.

    backend "exact" solves the radial ODE per k; "wkb" evaluates the
    leading quadrature phase; "model" uses a supplied analytic
    PhaseFunction (defaults to the closed form for the linear model).
    """
    if lam < 10.0:
        raise DomainError(f"scattering_matrix requires lambda >= 10, got {lam}")
    ks_pos = window_indices(lam, eps)
    if len(ks_pos) == 0:
        raise DomainError(f"empty index window for lambda={lam}, eps={eps}")
    xs = ks_pos / lam

    if backend == "model":
        if phase is None:
            if isinstance(profile, LinearProfile):
                phase = linear_phase_function(profile.t)
            else:
                raise DomainError("model backend needs an explicit PhaseFunction")
        deltas_pos = lam * np.asarray(phase.psi(xs), dtype=float) + 0.25
        errs_pos = np.zeros_like(deltas_pos)
    elif backend == "wkb":
        spl = profile_psi_spline(profile, xs[0] * 0.999, xs[-1] * 1.001 + 1e-9)
        deltas_pos = lam * spl(xs) + 0.25
        errs_pos = np.zeros_like(deltas_pos)
    elif backend == "exact":
        solver_opts.setdefault("steps_per_wavelength", _default_spw(lam))
        spl = profile_psi_spline(profile, xs[0] * 0.999, xs[-1] * 1.001 + 1e-9)
        deltas_pos = np.empty(len(ks_pos))
        errs_pos = np.empty(len(ks_pos))
        for i, k in enumerate(ks_pos):
            res = solve_phase_shift(profile, k / lam, 1.0 / lam, **solver_opts)
            anchor = lam * float(spl(k / lam)) + 0.25
            deltas_pos[i] = res.delta_fraction + round(anchor - res.delta_fraction)
            errs_pos[i] = res.est_error
            if abs(deltas_pos[i] - anchor) > 0.4:
                raise BranchError(
                    f"branch tear at lambda={lam}, k={k}: residual "
                    f"{deltas_pos[i] - anchor:+.3f}"
                )
    else:
        raise DomainError(f"unknown backend: {backend}")

    ks = np.concatenate([-ks_pos[::-1], ks_pos])
    deltas = np.concatenate([deltas_pos[::-1], deltas_pos])
    errs = np.concatenate([errs_pos[::-1], errs_pos])
    return PhaseShiftTable(
        lam=float(lam), eps=float(eps), backend=backend, ks=ks, deltas=deltas, est_errors=errs
    )
