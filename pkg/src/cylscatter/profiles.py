"""Surface-of-revolution profiles with a conic tip and a cylindrical end.

A profile is the function a(r) in the metric dr^2 + a(r)^2 dtheta^2 on
(0, inf) x S^1.  Two constructions are provided:

* the closed-form linear model  a(r) = r / sqrt(t^2 + r^2),
* a two-parameter family generated from a decaying coefficient f by
  integrating dy/dr = 1 / F(y) with F(y) = -2*alpha - beta*f(y) and
  setting a = y / sqrt(1 + y^2).

Both expose a, a', a'' together with the barrier function W = 1/a^2 - 1
and the coordinate y = W^(-1/2).  Derivatives of the family profile are
obtained analytically from f via the chain rule, never by differencing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import DomainError, IntegrationError, ParameterRangeError

__all__ = [
    "ProfileCoefficient",
    "rational_coefficient",
    "FamilyParameters",
    "SurfaceProfile",
    "LinearProfile",
    "FamilyProfile",
    "build_linear_model",
    "build_family_profile",
    "validate_profile",
    "check_convexity_condition",
    "profile_to_json",
    "profile_from_json",
]


# ---------------------------------------------------------------------------
# coefficient f
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProfileCoefficient:
    """A coefficient f on [0, inf) decaying like an order -2 symbol.

    ``f``, ``df``, ``d2f`` evaluate f and its first two derivatives
    (vectorised over numpy arrays).  ``c_decay`` is a constant for which

        |f| <= c/(1+y)^2,  |f'| <= c/(1+y)^3,  |f''| <= c/(1+y)^4

    holds on a test grid; :meth:`decay_report` re-checks it.
    """

    f: Callable
    df: Callable
    d2f: Callable
    c_decay: float
    kind: str = "callable"
    rho_fam: float | None = None

    def decay_report(self, y_max: float = 200.0, n: int = 2000) -> dict:
        y = np.linspace(0.0, y_max, n)
        w = 1.0 + y
        sup0 = float(np.max(np.abs(self.f(y)) * w**2))
        sup1 = float(np.max(np.abs(self.df(y)) * w**3))
        sup2 = float(np.max(np.abs(self.d2f(y)) * w**4))
        worst = max(sup0, sup1, sup2)
        return {
            "sup_f_weighted": sup0,
            "sup_df_weighted": sup1,
            "sup_d2f_weighted": sup2,
            "c_decay": self.c_decay,
            "passed": bool(worst <= self.c_decay * (1.0 + 1e-12)),
        }


def rational_coefficient(rho: float) -> ProfileCoefficient:
    """f(y) = 1 / (1 + rho*y^2), the default example family."""
    if rho <= 0.0:
        raise DomainError(f"rho must be positive, got {rho}")

    def f(y):
        y = np.asarray(y, dtype=float)
        return 1.0 / (1.0 + rho * y * y)

    def df(y):
        y = np.asarray(y, dtype=float)
        d = 1.0 + rho * y * y
        return -2.0 * rho * y / (d * d)

    def d2f(y):
        y = np.asarray(y, dtype=float)
        d = 1.0 + rho * y * y
        return (6.0 * rho * rho * y * y - 2.0 * rho) / (d * d * d)

    # numeric sup of the weighted bounds; rho <= 2/3 keeps these modest
    yg = np.linspace(0.0, 400.0, 8001)
    w = 1.0 + yg
    c = max(
        float(np.max(np.abs(f(yg)) * w**2)),
        float(np.max(np.abs(df(yg)) * w**3)),
        float(np.max(np.abs(d2f(yg)) * w**4)),
    )
    return ProfileCoefficient(f=f, df=df, d2f=d2f, c_decay=c, kind="rational", rho_fam=rho)


# ---------------------------------------------------------------------------
# family parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyParameters:
    """Parameters (alpha, beta) of the generating function F = -2a - b f."""

    alpha: float
    beta: float
    alpha0: float = -0.5
    half_width_alpha: float = 0.25
    half_width_beta: float = 0.25
    f_min: float = 1e-3

    def generating(self, coef: ProfileCoefficient, y):
        return -2.0 * self.alpha - self.beta * coef.f(y)

    def generating_slope(self, coef: ProfileCoefficient, y):
        return -self.beta * coef.df(y)

    def validate(self, coef: ProfileCoefficient, y_max: float = 400.0, n: int = 4001) -> None:
        """Raise ParameterRangeError unless F > f_min on [0, inf)."""
        y = np.linspace(0.0, y_max, n)
        fmin_grid = float(np.min(self.generating(coef, y)))
        # beyond the grid |f| <= c/(1+y)^2 bounds the excursion
        tail = -2.0 * self.alpha - abs(self.beta) * coef.c_decay / (1.0 + y_max) ** 2
        if min(fmin_grid, tail) <= self.f_min:
            raise ParameterRangeError(
                f"generating function not positive: min F = {min(fmin_grid, tail):.3e} "
                f"<= margin {self.f_min:.1e} for alpha={self.alpha}, beta={self.beta}"
            )


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------


class SurfaceProfile:
    """Common evaluators shared by all profile constructions.

    Subclasses supply ``y``, ``dy``, ``d2y`` and ``r_at_y``; everything
    else (a, a', a'', W, the reduced potential) follows analytically from
    a = y / sqrt(1 + y^2).
    """

    def y(self, r):  # pragma: no cover - abstract
        raise NotImplementedError

    def dy(self, r):  # pragma: no cover - abstract
        raise NotImplementedError

    def d2y(self, r):  # pragma: no cover - abstract
        raise NotImplementedError

    def r_at_y(self, y_val: float) -> float:  # pragma: no cover - abstract
        raise NotImplementedError

    @property
    def aprime0(self) -> float:  # pragma: no cover - abstract
        raise NotImplementedError

    # -- derived evaluators -------------------------------------------------

    def a(self, r):
        y = self.y(r)
        return y / np.sqrt(1.0 + y * y)

    def da(self, r):
        y = self.y(r)
        return self.dy(r) / (1.0 + y * y) ** 1.5

    def d2a(self, r):
        y = self.y(r)
        yp = self.dy(r)
        one = 1.0 + y * y
        return self.d2y(r) / one**1.5 - 3.0 * y * yp * yp / one**2.5

    def W(self, r):
        y = self.y(r)
        return 1.0 / (y * y)

    def r_turn(self, x: float) -> float:
        """Radius where a(r) = x, i.e. the classical turning point."""
        if not 0.0 < x < 1.0:
            raise DomainError(f"turning point requires 0 < x < 1, got {x}")
        return self.r_at_y(x / math.sqrt(1.0 - x * x))

    def curvature_term(self, r):
        a = self.a(r)
        ap = self.da(r)
        app = self.d2a(r)
        return (2.0 * app * a - ap * ap) / (4.0 * a * a)

    def reduced_potential(self, r, x: float, h: float):
        a = self.a(r)
        return x * x / (a * a) - h * h * self.curvature_term(r)

    def reduced_q(self, r, x: float, h: float):
        """(V(r; x, h) - 1) / h^2, the coefficient in u'' = q u."""
        return (self.reduced_potential(r, x, h) - 1.0) / (h * h)

    def to_dict(self) -> dict:  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True)
class LinearProfile(SurfaceProfile):
    """Closed-form linear model a(r) = r / sqrt(t^2 + r^2)."""

    t: float

    def y(self, r):
        return np.asarray(r, dtype=float) / self.t

    def dy(self, r):
        return np.full_like(np.asarray(r, dtype=float), 1.0 / self.t)

    def d2y(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    def r_at_y(self, y_val: float) -> float:
        return self.t * y_val

    @property
    def aprime0(self) -> float:
        return 1.0 / self.t

    def to_dict(self) -> dict:
        return {"kind": "linear", "t": self.t}


class FamilyProfile(SurfaceProfile):
    """Profile generated by integrating dy/dr = 1/F(y), y(0) = 0.

    y is tabulated by an adaptive integration and interpolated by a
    monotone piecewise cubic; y', y'' come from the ODE via f and f'.
    Beyond the tabulated range y is continued linearly with the exact
    asymptotic slope (f decays, so the drift is negligible).
    """

    def __init__(
        self,
        params: FamilyParameters,
        coefficient: ProfileCoefficient,
        r_nodes: np.ndarray,
        y_nodes: np.ndarray,
        r_max: float,
        n_nodes: int,
    ):
        self.params = params
        self.coefficient = coefficient
        self.r_max = float(r_max)
        self.n_nodes = int(n_nodes)
        self._interp = PchipInterpolator(r_nodes, y_nodes, extrapolate=False)
        self._r_end = float(r_nodes[-1])
        self._y_end = float(y_nodes[-1])
        self._slope_end = 1.0 / float(params.generating(coefficient, self._y_end))

    def y(self, r):
        arr = np.atleast_1d(np.asarray(r, dtype=float))
        inside = arr < self._r_end
        out = np.empty_like(arr)
        out[inside] = self._interp(arr[inside])
        out[~inside] = self._y_end + self._slope_end * (arr[~inside] - self._r_end)
        if np.ndim(r) == 0:
            return float(out[0])
        return out

    def dy(self, r):
        return 1.0 / self.params.generating(self.coefficient, self.y(r))

    def d2y(self, r):
        # y'' = -F'(y) y'^3 with F' = -beta f'
        y = self.y(r)
        yp = self.dy(r)
        return -self.params.generating_slope(self.coefficient, y) * yp**3

    def r_at_y(self, y_val: float) -> float:
        if y_val <= 0.0:
            raise DomainError(f"r_at_y requires y > 0, got {y_val}")
        if y_val >= self._y_end:
            return self._r_end + (y_val - self._y_end) / self._slope_end
        return float(brentq(lambda r: float(self.y(r)) - y_val, 0.0, self._r_end, xtol=1e-14))

    @property
    def aprime0(self) -> float:
        return 1.0 / float(self.params.generating(self.coefficient, 0.0))

    def to_dict(self) -> dict:
        coef = self.coefficient
        if coef.kind != "rational":
            raise DomainError("only rational coefficients serialise to JSON")
        return {
            "kind": "family",
            "alpha": self.params.alpha,
            "beta": self.params.beta,
            "coefficient": {"kind": "rational", "rho": coef.rho_fam},
            "grid": {"r_max": self.r_max, "nodes": self.n_nodes},
        }


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def build_linear_model(t: float) -> LinearProfile:
    """Exact linear-model profile with slope parameter t > 0."""
    if not (isinstance(t, (int, float)) and math.isfinite(t) and t > 0.0):
        raise DomainError(f"linear model requires t > 0, got {t}")
    return LinearProfile(float(t))


def build_family_profile(
    params: FamilyParameters,
    coefficient: ProfileCoefficient,
    r_max: float = 1000.0,
    nodes: int = 4001,
    rtol: float = 1e-12,
    atol: float = 1e-13,
) -> FamilyProfile:
    """Integrate dy/dr = 1/F(y) and tabulate the resulting profile.

    r_max is doubled (up to 5 times) until r^2 |a^2 - 1| has stabilised
    to within 1% between r_max/2 and r_max.
    """
    params.validate(coefficient)

    def rhs(_r, y):
        fval = params.generating(coefficient, y[0])
        if fval <= 0.0:
            raise ParameterRangeError(
                f"generating function hit {fval:.3e} <= 0 during integration"
            )
        return [1.0 / fval]

    r_hi = float(r_max)
    for _ in range(6):
        sol = solve_ivp(
            rhs,
            (0.0, r_hi),
            [0.0],
            method="DOP853",
            rtol=rtol,
            atol=atol,
            dense_output=True,
        )
        if not sol.success:
            raise IntegrationError(f"profile ODE integration failed: {sol.message}")

        def tail_value(r):
            y = float(sol.sol(r)[0])
            return r * r / (1.0 + y * y)  # = r^2 |a^2 - 1|

        v_half, v_full = tail_value(r_hi / 2.0), tail_value(r_hi)
        if abs(v_full - v_half) <= 0.01 * abs(v_full):
            break
        r_hi *= 2.0
    else:
        raise IntegrationError(f"cylindrical tail did not stabilise by r = {r_hi}")

    # nodes quadratically clustered near the tip, where y bends most
    r_nodes = np.linspace(0.0, math.sqrt(r_hi), nodes) ** 2
    y_nodes = sol.sol(r_nodes)[0]
    y_nodes[0] = 0.0
    return FamilyProfile(params, coefficient, r_nodes, y_nodes, r_hi, nodes)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass
class ProfileValidation:
    checks: dict = field(default_factory=dict)
    decay_constant: float = math.nan
    aprime0: float = math.nan

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def summary_rows(self):
        return [{"check": k, "passed": v} for k, v in sorted(self.checks.items())]


def validate_profile(
    profile: SurfaceProfile,
    r_min: float = 1e-6,
    r_max: float = 1e3,
    n: int = 400,
    growth_tol: float = 1.5,
) -> ProfileValidation:
    """Check the cylindrical-end and conic-tip conditions on a log grid."""
    rs = np.geomspace(r_min, r_max, n)
    a = np.asarray(profile.a(rs), dtype=float)
    ap = np.asarray(profile.da(rs), dtype=float)
    w = np.asarray(profile.W(rs), dtype=float)
    y = np.asarray(profile.y(rs), dtype=float)

    rep = ProfileValidation()
    rep.aprime0 = float(a[0] / rs[0])
    rep.checks["a_range"] = bool(np.all((a > 0.0) & (a < 1.0)))
    rep.checks["a_increasing"] = bool(np.all(ap > 0.0))
    rep.checks["conic_tip"] = bool(a[0] < 1e-3 and 0.0 < rep.aprime0 < math.inf)
    rep.checks["W_positive_decreasing"] = bool(np.all(w > 0.0) and np.all(np.diff(w) < 0.0))
    rep.checks["y_increasing"] = bool(np.all(np.diff(y) > 0.0))

    far = rs >= 1.0
    decay = rs[far] ** 2 * np.abs(a[far] ** 2 - 1.0)
    rep.decay_constant = float(np.max(decay))
    # short-range end: r^2 |a^2-1| must be bounded, i.e. not still growing
    rep.checks["short_range_decay"] = bool(
        decay[-1] <= growth_tol * np.median(decay[len(decay) // 2 :])
    )
    return rep


def check_convexity_condition(
    coefficient: ProfileCoefficient, y_max: float = 50.0, n: int = 2000
) -> dict:
    """Sign pattern of g_a(y) = a f'(y) + y f''(y) for a in {2, 3}.

    Advisory only; the binding convexity certificate is the numerically
    computed sign of the phase curvature in the WKB module.
    """
    y = np.linspace(1e-9, y_max, n)
    out = {"y_max": y_max}
    for a_exp in (2, 3):
        g = a_exp * coefficient.df(y) + y * coefficient.d2f(y)
        signs = np.sign(g)
        flips = np.nonzero(np.diff(signs) != 0)[0]
        out[f"g{a_exp}_sign_changes"] = [float(y[i]) for i in flips]
        out[f"g{a_exp}_all_nonnegative"] = bool(np.all(g >= -1e-14))
        out[f"g{a_exp}_all_nonpositive"] = bool(np.all(g <= 1e-14))
    return out


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------


def profile_to_json(profile: SurfaceProfile) -> str:
    return json.dumps(profile.to_dict(), sort_keys=True)


def profile_from_dict(spec: dict) -> SurfaceProfile:
    kind = spec.get("kind")
    if kind == "linear":
        return build_linear_model(float(spec["t"]))
    if kind == "family":
        coef_spec = spec["coefficient"]
        if coef_spec.get("kind") != "rational":
            raise DomainError(f"unknown coefficient kind: {coef_spec.get('kind')}")
        coef = rational_coefficient(float(coef_spec["rho"]))
        params = FamilyParameters(alpha=float(spec["alpha"]), beta=float(spec["beta"]))
        grid = spec.get("grid", {})
        return build_family_profile(
            params,
            coef,
            r_max=float(grid.get("r_max", 1000.0)),
            nodes=int(grid.get("nodes", 4001)),
        )
    raise DomainError(f"unknown profile kind: {kind}")


def profile_from_json(text: str) -> SurfaceProfile:
    return profile_from_dict(json.loads(text))
