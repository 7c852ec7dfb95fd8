"""Household price index, conservative nominal income and Domar aggregators.

The household holds CES preferences with expenditure shares mu and curvature
kappa (Cobb-Douglas utility at kappa = 0).  Real GDP growth under a
productivity shock z is

    ln H = -ln Pi(pi(z)) + ln Pi(1/z)

with the previous real GDP normalized to one: income is credited only up to
the conservative level ``W = H_prev * Pi(1/z)``, so a simple economy without
intermediate inputs (where pi = 1/z exactly) records zero growth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .economy import Economy, check_prices, check_shock
from .equilibrium import (
    solve_cobb_douglas,
    solve_fixed_point,
    solve_leontief,
)
from .errors import NoPositiveSolution, NonPositivePrice, SingularSystem

#: Below this |kappa| the price index uses the Cobb-Douglas log-limit.
KAPPA_SWITCH = 1e-8

GENERAL_CES = "general-ces"
LEONTIEF = "leontief"
COBB_DOUGLAS = "cobb-douglas"
METHODS = (GENERAL_CES, LEONTIEF, COBB_DOUGLAS)


@dataclass(frozen=True)
class HouseholdPrefs:
    """CES utility parameters: expenditure shares mu and curvature kappa."""

    mu: np.ndarray
    kappa: float = 0.0

    def __post_init__(self):
        mu = np.ascontiguousarray(np.asarray(self.mu, dtype=float))
        if mu.ndim != 1 or mu.size == 0:
            raise ValueError("mu must be a nonempty vector")
        if np.any(mu < 0):
            raise ValueError("expenditure shares must be nonnegative")
        if abs(mu.sum() - 1.0) > 1e-9:
            raise ValueError(f"expenditure shares sum to {mu.sum()!r}, expected 1")
        if not np.isfinite(self.kappa):
            raise ValueError("kappa must be finite")
        mu.flags.writeable = False
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "kappa", float(self.kappa))

    @property
    def n(self) -> int:
        return self.mu.size


@dataclass(frozen=True)
class Unviable:
    """Value-level outcome: the equilibrium left the positive orthant.

    Carried instead of raising so Monte Carlo runs can count and skip such
    samples.
    """

    method: str
    z: np.ndarray


def log_price_index(pi, prefs: HouseholdPrefs) -> float:
    """ln Pi(pi) for the household's CES price index."""
    pi = np.asarray(pi, dtype=float)
    if pi.shape != (prefs.n,):
        raise NonPositivePrice(
            f"price vector has shape {pi.shape}, expected ({prefs.n},)"
        )
    if not np.all(np.isfinite(pi)) or np.any(pi <= 0):
        raise NonPositivePrice("prices must be strictly positive")
    k = prefs.kappa
    if abs(k) < KAPPA_SWITCH:
        return float(prefs.mu @ np.log(pi))
    return float(np.log(prefs.mu @ pi**k) / k)


def price_index(pi, prefs: HouseholdPrefs) -> float:
    """CES price index Pi(pi); equals 1 at unit prices, homogeneous of
    degree one."""
    return float(np.exp(log_price_index(pi, prefs)))


def nominal_income(z, prefs: HouseholdPrefs, H_prev: float = 1.0) -> float:
    """Conservative nominal income ``W = H_prev * Pi(1/z)``."""
    z = check_shock(z, prefs.n)
    if H_prev <= 0:
        raise ValueError("H_prev must be positive")
    return float(H_prev * np.exp(log_price_index(1.0 / z, prefs)))


def real_gdp_growth(
    economy: Economy,
    prefs: HouseholdPrefs,
    z,
    method: str = GENERAL_CES,
    pi0: float = 1.0,
    tol: float = 1e-10,
    max_iter: int = 10000,
):
    """Log real GDP growth under shock z, or an Unviable marker.

    method selects how equilibrium prices are obtained: "general-ces" runs
    the recursive solver on the economy's own elasticities, "leontief" and
    "cobb-douglas" use their closed forms.  A solver that fails to converge
    (diverged or out of iterations) and a closed form without a positive
    solution both yield ``Unviable``.
    """
    z = check_shock(z, economy.n)
    if method == GENERAL_CES:
        result = solve_fixed_point(economy, z, pi0=pi0, tol=tol, max_iter=max_iter)
        if not result.converged:
            return Unviable(method=method, z=z)
        log_pi = np.log(result.pi)
    elif method == LEONTIEF:
        try:
            log_pi = np.log(solve_leontief(economy, z, pi0=pi0))
        except (NoPositiveSolution, SingularSystem):
            return Unviable(method=method, z=z)
    elif method == COBB_DOUGLAS:
        log_pi = solve_cobb_douglas(economy, z, pi0=pi0)
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    pi = np.exp(log_pi)
    return log_price_index(1.0 / z, prefs) - log_price_index(pi, prefs)


def domar_weights(economy: Economy, m) -> np.ndarray:
    """Linear shock weights of the Cobb-Douglas aggregator.

    Returns lambda such that the Cobb-Douglas-economy, Cobb-Douglas-utility
    growth is exactly ``ln H = sum_j lambda_j ln z_j``; with L the Leontief
    inverse, ``lambda = (L - I) m``.  The weights are zero without
    intermediate inputs: the conservative income rule exactly offsets the
    direct productivity gain, leaving only network amplification.
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (economy.n,):
        raise ValueError(f"m has shape {m.shape}, expected ({economy.n},)")
    if abs(m.sum() - 1.0) > 1e-9:
        raise ValueError("final-demand shares m must sum to 1")
    M = np.eye(economy.n) - economy.A
    try:
        Lm = np.linalg.solve(M, m)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    return Lm - m
