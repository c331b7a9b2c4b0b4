"""Closed-form covariance evolution under independent thermal reservoirs.

Each mode couples to its own Markovian bath with dissipation rate gamma_i
and thermal occupation nb_i.  The six second moments evolve in closed form:
occupations relax toward nb_i at rate 2 gamma_i, single-mode correlations
m_i decay at 2 gamma_i, cross correlations m_c, m_s at gamma_1 + gamma_2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidGrid
from .states import CovarianceMatrix, GaussianParams, cm_from_params, simon_criterion

__all__ = [
    "ChannelParams",
    "Trajectory",
    "evolve",
    "evolve_cm",
    "evolve_symmetric",
    "symmetric_initial_moments",
    "sample_trajectory",
    "count_sign_changes",
]


@dataclass(frozen=True)
class ChannelParams:
    """Reservoir couplings: dissipation rates gamma_i > 0 (inverse time) and
    bath thermal occupations nb_i >= 0."""

    gamma1: float
    gamma2: float
    nb1: float = 0.0
    nb2: float = 0.0

    def __post_init__(self):
        if not (self.gamma1 > 0 and self.gamma2 > 0):
            raise ValueError(f"dissipation rates must be > 0, got {self.gamma1}, {self.gamma2}")
        if self.nb1 < 0 or self.nb2 < 0:
            raise ValueError(f"bath occupations must be >= 0, got {self.nb1}, {self.nb2}")

    @classmethod
    def symmetric(cls, gamma: float, nb: float = 0.0) -> "ChannelParams":
        return cls(gamma1=gamma, gamma2=gamma, nb1=nb, nb2=nb)


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution curve: strictly increasing times, the covariance at
    each time, and the Simon value at each time."""

    times: tuple[float, ...]
    states: tuple[CovarianceMatrix, ...]
    simon: tuple[float, ...]

    def __post_init__(self):
        if not (len(self.times) == len(self.states) == len(self.simon)):
            raise InvalidGrid("trajectory fields must have equal lengths")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise InvalidGrid("trajectory times must be strictly increasing")


def evolve(p0: GaussianParams, ch: ChannelParams, t: float) -> CovarianceMatrix:
    """Covariance moments at time t >= 0 for initial parameters p0.

    Implements the closed-form solutions of the thermal-reservoir master
    equation; at t = 0 this reduces exactly to cm_from_params(p0), and for
    t -> infinity it converges to the bath moments (n_i = nb_i, m = 0).
    """
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    e1 = math.exp(-2.0 * ch.gamma1 * t)
    e2 = math.exp(-2.0 * ch.gamma2 * t)
    ec = math.exp(-(ch.gamma1 + ch.gamma2) * t)
    chr2 = math.cosh(p0.r) ** 2
    shr2 = math.sinh(p0.r) ** 2
    psum = 1.0 + p0.nu1 + p0.nu2

    n1 = e1 * (
        (math.exp(2.0 * ch.gamma1 * t) - 1.0) * ch.nb1
        + math.cosh(2.0 * p0.z1) * (p0.nu1 * chr2 + (1.0 + p0.nu2) * shr2)
        + math.sinh(p0.z1) ** 2
    )
    n2 = e2 * (
        (math.exp(2.0 * ch.gamma2 * t) - 1.0) * ch.nb2
        + math.cosh(2.0 * p0.z2) * (p0.nu2 * chr2 + (1.0 + p0.nu1) * shr2)
        + math.sinh(p0.z2) ** 2
    )
    m1 = -e1 * (p0.nu1 - p0.nu2 + psum * math.cosh(2.0 * p0.r)) * math.cosh(p0.z1) * math.sinh(p0.z1)
    m2 = -e2 * (p0.nu2 - p0.nu1 + psum * math.cosh(2.0 * p0.r)) * math.cosh(p0.z2) * math.sinh(p0.z2)
    mc = 0.5 * ec * psum * math.cosh(p0.z1 + p0.z2) * math.sinh(2.0 * p0.r)
    ms = -0.5 * ec * psum * math.sinh(2.0 * p0.r) * math.sinh(p0.z1 + p0.z2)
    return CovarianceMatrix(n1=n1, n2=n2, m1=m1, m2=m2, ms=ms, mc=mc)


def evolve_cm(cm: CovarianceMatrix, ch: ChannelParams, t: float) -> CovarianceMatrix:
    """Propagate arbitrary covariance moments for a further time t.

    This is the semigroup form of the channel (n_i relaxes exponentially
    toward nb_i, correlations decay); evolve(p0, ch, t) equals
    evolve_cm(cm_from_params(p0), ch, t) up to rounding.
    """
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    e1 = math.exp(-2.0 * ch.gamma1 * t)
    e2 = math.exp(-2.0 * ch.gamma2 * t)
    ec = math.exp(-(ch.gamma1 + ch.gamma2) * t)
    return CovarianceMatrix(
        n1=ch.nb1 + e1 * (cm.n1 - ch.nb1),
        n2=ch.nb2 + e2 * (cm.n2 - ch.nb2),
        m1=e1 * cm.m1,
        m2=e2 * cm.m2,
        ms=ec * cm.ms,
        mc=ec * cm.mc,
    )


def symmetric_initial_moments(r0: float, nu0: float = 0.0) -> tuple[float, float]:
    """Initial (n0, m0) for the symmetric case z = 0, nu1 = nu2 = nu0:
    n0 = ((2 nu0 + 1) cosh 2r0 - 1)/2, m0 = (2 nu0 + 1) sinh(2 r0)/2."""
    n0 = 0.5 * ((2.0 * nu0 + 1.0) * math.cosh(2.0 * r0) - 1.0)
    m0 = 0.5 * (2.0 * nu0 + 1.0) * math.sinh(2.0 * r0)
    return n0, m0


def evolve_symmetric(n0: float, m0: float, gamma: float, t: float) -> tuple[float, float]:
    """Symmetric zero-temperature case: both surviving moments scale by
    exp(-2 gamma t)."""
    decay = math.exp(-2.0 * gamma * t)
    return n0 * decay, m0 * decay


def sample_trajectory(
    p0: GaussianParams, ch: ChannelParams, t_max: float, n_points: int
) -> Trajectory:
    """Evaluate the evolved covariance and Simon value on a uniform time grid
    over [0, t_max], both endpoints included."""
    if not (t_max > 0):
        raise InvalidGrid(f"t_max must be > 0, got {t_max}")
    if n_points < 2:
        raise InvalidGrid(f"n_points must be >= 2, got {n_points}")
    times = tuple(t_max * i / (n_points - 1) for i in range(n_points))
    states = tuple(evolve(p0, ch, t) for t in times)
    simon = tuple(simon_criterion(cm) for cm in states)
    return Trajectory(times=times, states=states, simon=simon)


def count_sign_changes(values, tol: float = 1e-12) -> int:
    """Number of sign flips in a sampled curve, ignoring excursions smaller
    than tol.

    Values inside [-tol, tol] do not update the latched sign, which keeps
    late-time floating-point flicker around zero from being miscounted as
    crossings.
    """
    changes = 0
    latched = 0
    for v in values:
        if v > tol:
            s = 1
        elif v < -tol:
            s = -1
        else:
            continue
        if latched != 0 and s != latched:
            changes += 1
        latched = s
    return changes
