"""Geodesic rotation numbers and their quantum counterpart.

A geodesic with impact parameter x in (0, 1) comes in from the
cylindrical end, reaches the turning radius r_-(x) where a(r_-) = x,
and leaves; its accumulated angle diverges linearly, but subtracting
the free-motion angle of the flat cylinder leaves the renormalized
rotation

    dtheta_ren(x) = 2 int_{r_-}^inf (x/a^2) (1 - x^2/a^2)^{-1/2} dr
                    - 2 x (1 - x^2)^{-1/2} * (length of the free ray),

which equals -2 pi psi'(x) for the semiclassical phase psi.  The
quantum analogue is the phase-shift increment: 2 pi (delta_{k+1} -
delta_k) tends to 2 pi psi'(x) = -dtheta_ren(x), so the calibrated
discrepancy is |2 pi (delta_{k+1} - delta_k) + dtheta_ren|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DomainError
from .profiles import SurfaceProfile
from .radial import _default_spw, solve_phase_shift, window_indices
from .wkb import profile_psi_spline, psi_leading

__all__ = [
    "action_I2",
    "renormalized_rotation",
    "RotationCheck",
    "quantum_classical_check",
]


def action_I2(profile: SurfaceProfile, b1: float, b2: float) -> float:
    """Radial action of the geodesic flow at energies (b1, b2).

    Homogeneous of degree one in (b1, b2) and even in b2:
    I2(b1, b2) = b1 psi(|b2|/b1).
    """
    if b1 <= 0:
        raise DomainError(f"action_I2 needs b1 > 0, got {b1}")
    x = abs(b2) / b1
    if x >= 1.0:
        raise DomainError(f"action_I2 needs |b2| < b1, got ratio {x}")
    if x == 0.0:
        return 0.0
    return b1 * psi_leading(profile, x)


def renormalized_rotation(profile: SurfaceProfile, x: float, tol: float = 1e-10) -> float:
    """Rotation angle of the geodesic with impact parameter x, free part removed."""
    if not 0.0 < x < 1.0:
        raise DomainError(f"renormalized_rotation requires 0 < x < 1, got {x}")
    rm = profile.r_turn(x)
    free = x / math.sqrt(1.0 - x * x)

    def excess(r):
        a = float(profile.a(r))
        s = 1.0 - x * x / (a * a)
        return x / (a * a * math.sqrt(s)) - free

    # inverse-sqrt singularity at r_-: u = sqrt(r - r_-)
    def near(u):
        return 2.0 * u * excess(rm + u * u)

    part_near, _ = quad(near, 0.0, 1.0, epsabs=tol, epsrel=1e-13, limit=200)

    # tail: substitute s = 1/r; the excess decays like 1/r^2
    def far(s):
        return excess(1.0 / s) / (s * s)

    part_far, _ = quad(far, 1e-12, 1.0 / (rm + 1.0), epsabs=tol, epsrel=1e-13, limit=200)
    return 2.0 * (part_near + part_far) - 2.0 * free * rm


@dataclass
class RotationCheck:
    lam: float
    xs: np.ndarray
    rotation: np.ndarray  # dtheta_ren at the midpoints
    increments: np.ndarray  # 2 pi (delta_{k+1} - delta_k)
    discrepancy: np.ndarray

    @property
    def sup(self) -> float:
        return float(np.max(self.discrepancy))

    def write_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["lambda", "x", "rotation", "increment", "discrepancy"])
            for x, rot, inc, dis in zip(
                self.xs, self.rotation, self.increments, self.discrepancy
            ):
                w.writerow(
                    [
                        f"{self.lam:.17g}",
                        f"{x:.17g}",
                        f"{rot:.17g}",
                        f"{inc:.17g}",
                        f"{dis:.17g}",
                    ]
                )


def quantum_classical_check(
    profile: SurfaceProfile,
    lam: float,
    eps: float = 0.1,
    n_grid: int = 24,
    backend: str = "exact",
) -> RotationCheck:
    """Compare phase-shift increments against the classical rotation number.

    Evaluates 2 pi (delta_{k+1} - delta_k) on a subsampled k-grid and the
    renormalized rotation at the midpoints x = (k + 1/2)/lam.  For the
    exact backend the sup-discrepancy inherits the O(1/lam) semiclassical
    error; the WKB backend isolates the pure discretisation effect.
    """
    ks_all = window_indices(lam, eps)
    if len(ks_all) < 2:
        raise DomainError(f"window too small at lam={lam}, eps={eps}")
    idx = np.unique(np.linspace(0, len(ks_all) - 2, n_grid).round().astype(int))
    ks = ks_all[idx]

    if backend == "exact":
        spw = _default_spw(lam)
        spl = profile_psi_spline(profile, ks_all[0] / lam * 0.999, (ks_all[-1] + 1) / lam * 1.001)

        def delta(k):
            res = solve_phase_shift(profile, k / lam, 1.0 / lam, steps_per_wavelength=spw)
            anchor = lam * float(spl(k / lam)) + 0.25
            return res.delta_fraction + round(anchor - res.delta_fraction)

    elif backend == "wkb":
        spl = profile_psi_spline(profile, ks_all[0] / lam * 0.999, (ks_all[-1] + 1) / lam * 1.001)

        def delta(k):
            return lam * float(spl(k / lam)) + 0.25

    else:
        raise DomainError(f"unknown backend: {backend}")

    xs = (ks + 0.5) / lam
    increments = np.array([2.0 * math.pi * (delta(k + 1) - delta(k)) for k in ks])
    rot = np.array([renormalized_rotation(profile, float(x)) for x in xs])
    return RotationCheck(
        lam=float(lam),
        xs=xs,
        rotation=rot,
        increments=increments,
        discrepancy=np.abs(increments + rot),
    )
