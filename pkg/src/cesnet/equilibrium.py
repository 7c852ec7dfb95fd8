"""Equilibrium price solvers: recursive fixed point and closed forms.

The equilibrium condition is ``pi = diag(z)^{-1} c(pi; pi0)`` where c stacks
the sector CES unit cost functions.  The recursion is a contraction on the
positive orthant whenever a positive fixed point exists, so iterating from
the benchmark converges globally; nonexistence shows up as divergence.

Closed forms exist for uniform elasticity (any gamma != 0), the Leontief
economy (gamma = 1, a single linear solve) and the Cobb-Douglas economy
(gamma = 0, a linear solve in logs).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .economy import Economy, check_prices, check_shock
from .errors import NoPositiveSolution, SingularSystem

#: Below this |gamma| the CES power form is replaced by its log-limit.
GAMMA_SWITCH = 1e-8

#: Any iterate above this level is treated as divergence to infinity.
OVERFLOW_GUARD = 1e12

CONVERGED = "converged"
DIVERGED = "diverged"
MAX_ITERATIONS = "max_iterations"


@dataclass(frozen=True)
class EquilibriumResult:
    """Outcome of the recursive solver.

    ``status`` is one of "converged", "diverged" or "max_iterations"; prices
    are meaningful only when converged.
    """

    pi: np.ndarray
    iterations: int
    residual: float
    status: str

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED


def unit_costs(economy: Economy, pi, pi0: float = 1.0) -> np.ndarray:
    """CES unit costs of all sectors at prices (pi0, pi), without the 1/z.

    Sectors with |gamma| below GAMMA_SWITCH use the Cobb-Douglas log-limit
    ``exp(sum_i a_ij ln pi_i)``; the power form loses all precision there.
    """
    pi, pi0 = check_prices(pi, economy.n, pi0)
    paug = np.concatenate(([pi0], pi))
    return _unit_costs_raw(economy.augmented_coefficients(), economy.gamma, paug)


def _unit_costs_raw(aug, g, paug):
    """Unit costs without input validation; hot path of the solver."""
    c = np.empty(g.size)
    small = np.abs(g) < GAMMA_SWITCH
    if small.any():
        c[small] = np.exp(np.log(paug) @ aug[:, small])
    rest = ~small
    if rest.any():
        gr = g[rest]
        powers = paug[:, None] ** gr[None, :]
        c[rest] = np.einsum("ij,ij->j", aug[:, rest], powers) ** (1.0 / gr)
    return c


def unit_cost(economy: Economy, j: int, pi, pi0: float = 1.0) -> float:
    """Unit cost of sector j; equals 1 at the benchmark by adding-up."""
    return float(unit_costs(economy, pi, pi0)[j])


def cost_map(economy: Economy, pi, z, pi0: float = 1.0) -> np.ndarray:
    """One sweep of the equilibrium recursion: ``c(pi; pi0) / z``.

    The map is monotone and strictly concave in pi, which is what makes the
    recursion a contraction.
    """
    z = check_shock(z, economy.n)
    return unit_costs(economy, pi, pi0) / z


def solve_fixed_point(
    economy: Economy,
    z,
    pi0: float = 1.0,
    tol: float = 1e-10,
    max_iter: int = 10000,
    pi_init=None,
) -> EquilibriumResult:
    """Iterate the price recursion from the benchmark until convergence.

    Returns an EquilibriumResult; status "diverged" signals that no positive
    equilibrium exists (an iterate left the positive orthant or exceeded the
    overflow guard).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    z = check_shock(z, economy.n)
    pi = np.ones(economy.n) if pi_init is None else np.asarray(pi_init, float).copy()
    pi, pi0 = check_prices(pi, economy.n, pi0)
    aug = economy.augmented_coefficients()
    g = economy.gamma
    paug = np.concatenate(([pi0], pi))
    residual = np.inf
    for it in range(1, max_iter + 1):
        pi_new = _unit_costs_raw(aug, g, paug) / z
        if not np.all(np.isfinite(pi_new)) or np.any(pi_new <= 0) or np.any(
            pi_new > OVERFLOW_GUARD
        ):
            return EquilibriumResult(pi_new, it, np.inf, DIVERGED)
        residual = float(np.max(np.abs(pi_new - paug[1:])))
        paug[1:] = pi_new
        if residual <= tol:
            return EquilibriumResult(pi_new, it, residual, CONVERGED)
    return EquilibriumResult(paug[1:].copy(), max_iter, residual, MAX_ITERATIONS)


def solve_uniform_ces(economy: Economy, z, gamma: float, pi0: float = 1.0) -> np.ndarray:
    """Closed-form prices for a uniform-elasticity economy (gamma != 0).

    Solves ``q (diag(z)^gamma - A) = a0 * pi0^gamma`` for q = pi^gamma and
    takes the 1/gamma power.  Raises NoPositiveSolution if q is not strictly
    positive (the equilibrium does not exist in the positive orthant) and
    SingularSystem if the bracketed matrix is not invertible.
    """
    if gamma == 0:
        raise ValueError("gamma must be nonzero; use solve_cobb_douglas")
    z = check_shock(z, economy.n)
    if pi0 <= 0:
        raise NoPositiveSolution("numeraire must be positive")
    M = np.diag(z**gamma) - economy.A
    try:
        q = np.linalg.solve(M.T, economy.a0 * pi0**gamma)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(q)) or np.any(q <= 0):
        raise NoPositiveSolution(
            "uniform-CES linear solve left the positive orthant"
        )
    return q ** (1.0 / gamma)


def solve_leontief(economy: Economy, z, pi0: float = 1.0) -> np.ndarray:
    """Closed-form Leontief prices: one linear solve, no powers.

    ``pi (diag(z) - A) = pi0 a0``.  Raises NoPositiveSolution when the
    Hawkins-Simon condition fails for ``diag(z) - A``.
    """
    z = check_shock(z, economy.n)
    if pi0 <= 0:
        raise NoPositiveSolution("numeraire must be positive")
    M = np.diag(z) - economy.A
    try:
        pi = np.linalg.solve(M.T, pi0 * economy.a0)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(pi)) or np.any(pi <= 0):
        raise NoPositiveSolution("Leontief prices left the positive orthant")
    return pi


def solve_cobb_douglas(economy: Economy, z, pi0: float = 1.0) -> np.ndarray:
    """Closed-form Cobb-Douglas log-prices.

    ``ln pi = (a0 ln pi0 - ln z) [I - A]^{-1}``; the result always
    exponentiates to a positive price vector.
    """
    z = check_shock(z, economy.n)
    if pi0 <= 0:
        raise NoPositiveSolution("numeraire must be positive")
    M = np.eye(economy.n) - economy.A
    rhs = economy.a0 * np.log(pi0) - np.log(z)
    try:
        return np.linalg.solve(M.T, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
