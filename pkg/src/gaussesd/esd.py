"""Entanglement sudden death (ESD) detection.

For symmetric pure states (z1 = z2 = z0, nu = 0) in equal zero-temperature
channels, separation happens at a finite time exactly when

    0 < r0 < log(cosh(2 z0)) / 2,

and the separation time follows from a closed-form decay ratio
exp(-2 gamma t_esd).  General channels are handled by root-finding on the
Simon value along the evolved trajectory.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelParams, evolve
from .errors import BudgetExceeded, DomainError, InvalidGrid
from .states import GaussianParams, simon_criterion

__all__ = [
    "EsdKind",
    "EsdMethod",
    "EsdResult",
    "esd_condition_symmetric",
    "symmetric_esd_decay_ratio",
    "symmetric_esd_decay_ratio_alt",
    "compare_decay_ratio_forms",
    "t_esd_analytic_symmetric",
    "t_esd_numeric",
    "initial_entanglement_threshold",
    "esd_boundary_sweep",
]

# Simon values inside this band around zero are numerically indistinguishable
# from zero (cancellation noise of the invariant combination) and are never
# treated as sign information.
SIGN_TOL = 1e-12


class EsdKind(enum.Enum):
    FINITE_TIME = "FiniteTime"
    ASYMPTOTIC = "Asymptotic"
    INITIALLY_SEPARABLE = "InitiallySeparable"


class EsdMethod(enum.Enum):
    ANALYTIC = "Analytic"
    NUMERIC_ROOT = "NumericRoot"


@dataclass(frozen=True)
class EsdResult:
    """Outcome of an ESD query.  t_esd is present exactly when
    kind == FINITE_TIME."""

    kind: EsdKind
    method: EsdMethod
    t_esd: float | None = None
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if (self.kind is EsdKind.FINITE_TIME) != (self.t_esd is not None):
            raise ValueError("t_esd must be present exactly when kind is FiniteTime")
        if self.t_esd is not None and not self.t_esd > 0:
            raise ValueError(f"t_esd must be > 0, got {self.t_esd}")


def esd_condition_symmetric(z0: float, r0: float) -> bool:
    """True when a symmetric pure state (z1 = z2 = z0) in equal
    zero-temperature channels separates at a finite time:
    0 < r0 < log(cosh(2 z0)) / 2."""
    if not r0 > 0:
        raise ValueError(f"r0 must be > 0, got {r0}")
    return r0 < 0.5 * math.log(math.cosh(2.0 * z0))


def symmetric_esd_decay_ratio(z0: float, r0: float) -> float:
    """Decay ratio R = exp(-2 gamma t_esd) for the symmetric pure
    zero-temperature case, in the eta/zeta form

        R = eta (1 + zeta^2 - 2 eta zeta) / (eta - zeta - eta^2 zeta + zeta^2 eta)

    with eta = exp(2 r0), zeta = exp(2 z0).  A finite separation time exists
    exactly when R lies in (0, 1), which reproduces the condition
    r0 < log(cosh 2 z0)/2.  This form agrees with the numeric root of the
    Simon value throughout its validity window.
    """
    eta = math.exp(2.0 * r0)
    zeta = math.exp(2.0 * z0)
    den = eta - zeta - eta * eta * zeta + zeta * zeta * eta
    if den == 0.0:
        raise DomainError(f"decay-ratio denominator vanishes at z0={z0}, r0={r0}")
    return eta * (1.0 + zeta * zeta - 2.0 * eta * zeta) / den


def symmetric_esd_decay_ratio_alt(z0: float, r0: float) -> float:
    """Alternative closed form for the decay ratio,

        R = (2 e^{r0} cosh(2 z0) sinh(r0) - 2 sinh^2 z0)
            / (e^{2 r0} (cosh(2 r0) - sinh(2 z0))).

    This expression is inconsistent with :func:`symmetric_esd_decay_ratio`
    (e.g. at z0 = 0 it yields a ratio in (0, 1), predicting finite-time
    separation where the decay is in fact asymptotic) and does not match the
    numeric root anywhere tested.  Kept for the comparison diagnostic only.
    """
    num = 2.0 * math.exp(r0) * math.cosh(2.0 * z0) * math.sinh(r0) - 2.0 * math.sinh(z0) ** 2
    den = math.exp(2.0 * r0) * (math.cosh(2.0 * r0) - math.sinh(2.0 * z0))
    if den == 0.0:
        raise DomainError(f"alt decay-ratio denominator vanishes at z0={z0}, r0={r0}")
    return num / den


def compare_decay_ratio_forms(z0: float, r0: float) -> dict:
    """Diagnostic comparing the two closed-form decay ratios.

    Returns both ratios, whether each lies in the valid band (0, 1), and
    whether they disagree about the existence or value of t_esd.
    """
    r_canonical = symmetric_esd_decay_ratio(z0, r0)
    r_alt = symmetric_esd_decay_ratio_alt(z0, r0)
    valid_canonical = 0.0 < r_canonical < 1.0
    valid_alt = 0.0 < r_alt < 1.0
    disagree = (valid_canonical != valid_alt) or (
        valid_canonical and valid_alt and not math.isclose(r_canonical, r_alt, rel_tol=1e-9)
    )
    return {
        "ratio_canonical": r_canonical,
        "ratio_alt": r_alt,
        "valid_canonical": valid_canonical,
        "valid_alt": valid_alt,
        "disagree": disagree,
    }


def t_esd_analytic_symmetric(z0: float, r0: float, gamma: float) -> EsdResult:
    """Closed-form separation time for the symmetric pure zero-temperature
    case.  Returns FiniteTime with t_esd = -ln(R)/(2 gamma) when the decay
    ratio R lies in (0, 1), Asymptotic otherwise."""
    if not (r0 > 0 and gamma > 0):
        raise ValueError(f"need r0 > 0 and gamma > 0, got r0={r0}, gamma={gamma}")
    ratio = symmetric_esd_decay_ratio(z0, r0)
    if 0.0 < ratio < 1.0:
        return EsdResult(
            kind=EsdKind.FINITE_TIME,
            method=EsdMethod.ANALYTIC,
            t_esd=-math.log(ratio) / (2.0 * gamma),
            diagnostics={"decay_ratio": ratio},
        )
    return EsdResult(
        kind=EsdKind.ASYMPTOTIC,
        method=EsdMethod.ANALYTIC,
        diagnostics={"decay_ratio": ratio},
    )


def t_esd_numeric(
    p0: GaussianParams,
    ch: ChannelParams,
    t_max: float,
    time_tol: float = 1e-10,
    max_iter: int = 200,
) -> EsdResult:
    """Separation time by sign scan and bisection on the Simon value S(t).

    If S(0) >= 0 the state is InitiallySeparable.  Otherwise S is scanned on
    a geometric grid (ratio 1.25, starting at 1e-3 over the mean rate, capped
    at t_max); the first sign change is bisected to absolute time tolerance
    ``time_tol``.  Without a sign change by t_max the decay is classified
    Asymptotic, with t_max and S(t_max) recorded in the diagnostics.
    """
    if not t_max > 0:
        raise ValueError(f"t_max must be > 0, got {t_max}")

    def s_of(t: float) -> float:
        return simon_criterion(evolve(p0, ch, t))

    s0 = s_of(0.0)
    if s0 >= 0.0:
        return EsdResult(
            kind=EsdKind.INITIALLY_SEPARABLE,
            method=EsdMethod.NUMERIC_ROOT,
            diagnostics={"s0": s0},
        )

    gamma_mean = 0.5 * (ch.gamma1 + ch.gamma2)
    t_lo = 0.0
    t = min(1e-3 / gamma_mean, t_max)
    bracket = None
    while True:
        if s_of(t) >= SIGN_TOL:
            bracket = (t_lo, t)
            break
        t_lo = t
        if t >= t_max:
            break
        t = min(t * 1.25, t_max)

    if bracket is None:
        return EsdResult(
            kind=EsdKind.ASYMPTOTIC,
            method=EsdMethod.NUMERIC_ROOT,
            diagnostics={"t_max": t_max, "s_at_t_max": s_of(t_max)},
        )

    lo, hi = bracket
    for _ in range(max_iter):
        if hi - lo < time_tol:
            break
        mid = 0.5 * (lo + hi)
        if s_of(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    else:
        raise BudgetExceeded(f"bisection did not converge within {max_iter} iterations")
    return EsdResult(
        kind=EsdKind.FINITE_TIME,
        method=EsdMethod.NUMERIC_ROOT,
        t_esd=0.5 * (lo + hi),
        diagnostics={"bracket": bracket},
    )


def initial_entanglement_threshold(nu1: float, nu2: float) -> float:
    """Smallest two-mode squeezing that entangles the initial state with
    z1 = z2 = 0 and thermal occupations (nu1, nu2):

        r_min = arccosh(Q) / 4,
        Q = ((1+nu2)^2 + 2 nu1 (1+nu2)(1+4 nu2) + nu1^2 (1 + 8 nu2 (1+nu2)))
            / (1 + nu1 + nu2)^2.

    States with r0 > r_min have S(0) < 0.  Q is symmetric in (nu1, nu2) and
    equals 1 (threshold zero) whenever either mode is pure.
    """
    if nu1 < 0 or nu2 < 0:
        raise ValueError(f"occupations must be >= 0, got {nu1}, {nu2}")
    num = (
        (1.0 + nu2) ** 2
        + 2.0 * nu1 * (1.0 + nu2) * (1.0 + 4.0 * nu2)
        + nu1 * nu1 * (1.0 + 8.0 * nu2 * (1.0 + nu2))
    )
    arg = num / (1.0 + nu1 + nu2) ** 2
    if arg < 1.0:
        if arg < 1.0 - 1e-9:
            raise DomainError(f"arccosh argument {arg} below 1")
        arg = 1.0
    return 0.25 * math.acosh(arg)


def esd_boundary_sweep(r0: float, ch: ChannelParams, z_grid, t_grid) -> np.ndarray:
    """Sign of the Simon value per (z, t) cell for symmetric pure initial
    states (z1 = z2 = z) with two-mode squeezing r0.

    Returns an int matrix of shape (len(z_grid), len(t_grid)) holding -1
    (entangled), +1 (separable) or 0 (inside the numerical dead band).
    """
    z_grid = np.asarray(z_grid, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    if z_grid.ndim != 1 or t_grid.ndim != 1 or z_grid.size == 0 or t_grid.size == 0:
        raise InvalidGrid("z_grid and t_grid must be non-empty 1-d sequences")
    if np.any(np.diff(z_grid) <= 0) or np.any(np.diff(t_grid) <= 0):
        raise InvalidGrid("grids must be strictly increasing")
    if np.any(t_grid < 0):
        raise InvalidGrid("times must be >= 0")

    signs = np.zeros((z_grid.size, t_grid.size), dtype=int)
    for i, z in enumerate(z_grid):
        p0 = GaussianParams.symmetric(float(z), r0)
        for j, t in enumerate(t_grid):
            s = simon_criterion(evolve(p0, ch, float(t)))
            signs[i, j] = 1 if s > SIGN_TOL else (-1 if s < -SIGN_TOL else 0)
    return signs
