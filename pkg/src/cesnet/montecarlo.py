"""Shock sampling, fluctuation distributions, QQ points and the HP filter.

Samples are drawn as iid lognormal sector shocks, pushed through a Domar
aggregator, and summarized over the viable draws.  Every sample's random
stream is derived from (seed, sample index), so runs are reproducible
regardless of evaluation order or worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
from scipy.linalg import solveh_banded
from scipy.stats import norm

from .economy import Economy
from .errors import (
    AllSamplesUnviable,
    DegenerateSample,
    SeriesTooShort,
    SingularSystem,
    TooFewSamples,
)
from .household import GENERAL_CES, HouseholdPrefs, Unviable, real_gdp_growth

QUANTILE_GRID = (0.01, 0.05, 0.10, 0.25, 0.50, 0.75, 0.90, 0.95, 0.99)


@dataclass(frozen=True)
class ShockConfig:
    """Sampling law for log shocks: ``ln z_j ~ N(mean, sigma)`` iid."""

    count: int = 10000
    sigma: float = 0.2
    seed: int = 0
    mean: float = 0.0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class DistributionSummary:
    """Moments, quantiles and viability counts of simulated ln H draws."""

    mean: float
    variance: float
    skewness: float
    kurtosis: float
    quantiles: dict[str, float]
    n_viable: int
    n_unviable: int
    method: str
    seed: int
    samples: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        """JSON-ready summary (without the raw samples)."""
        return {
            "mean": self.mean,
            "variance": self.variance,
            "skewness": self.skewness,
            "kurtosis": self.kurtosis,
            "quantiles": self.quantiles,
            "n_viable": self.n_viable,
            "n_unviable": self.n_unviable,
            "method": self.method,
            "seed": self.seed,
        }


def shock_sample(n: int, config: ShockConfig, index: int) -> np.ndarray:
    """The index-th shock vector of the stream: its own (seed, index) rng."""
    rng = np.random.default_rng([config.seed, index])
    return np.exp(config.mean + config.sigma * rng.standard_normal(n))


def sample_shocks(n: int, config: ShockConfig) -> Iterator[np.ndarray]:
    """Yield the deterministic stream of ``config.count`` shock vectors."""
    for k in range(config.count):
        yield shock_sample(n, config, k)


def simulate_distribution(
    economy: Economy,
    prefs: HouseholdPrefs,
    config: ShockConfig,
    method: str = GENERAL_CES,
    workers: int = 1,
) -> DistributionSummary:
    """Push the shock stream through a Domar aggregator and summarize.

    Unviable draws are counted and excluded; all statistics are over the
    viable draws only.  Results are identical for any ``workers`` value
    because draws are indexed and aggregated in index order.
    """
    shocks = [shock_sample(economy.n, config, k) for k in range(config.count)]

    def evaluate(z):
        return real_gdp_growth(economy, prefs, z, method=method)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(evaluate, shocks))
    else:
        outcomes = [evaluate(z) for z in shocks]

    samples = np.array(
        [g for g in outcomes if not isinstance(g, Unviable)], dtype=float
    )
    n_unviable = config.count - samples.size
    if samples.size == 0:
        raise AllSamplesUnviable(
            f"all {config.count} samples unviable for method {method!r}"
        )
    return summarize_samples(
        samples, n_unviable=n_unviable, method=method, seed=config.seed
    )


def summarize_samples(samples, n_unviable=0, method="", seed=0) -> DistributionSummary:
    """Build a DistributionSummary from raw ln H draws."""
    samples = np.asarray(samples, dtype=float)
    mean = float(np.mean(samples))
    if samples.size > 1:
        variance = float(np.var(samples, ddof=1))
        sd = np.sqrt(np.var(samples))
        if sd > 0:
            centred = (samples - mean) / sd
            skewness = float(np.mean(centred**3))
            kurtosis = float(np.mean(centred**4) - 3.0)
        else:
            skewness = 0.0
            kurtosis = 0.0
    else:
        variance = 0.0
        skewness = 0.0
        kurtosis = 0.0
    quantiles = {
        f"{q:g}": float(np.quantile(samples, q)) for q in QUANTILE_GRID
    }
    return DistributionSummary(
        mean=mean,
        variance=variance,
        skewness=skewness,
        kurtosis=kurtosis,
        quantiles=quantiles,
        n_viable=int(samples.size),
        n_unviable=int(n_unviable),
        method=method,
        seed=seed,
        samples=samples,
    )


def price_index_dispersion(economy: Economy, m, shocks) -> tuple[np.ndarray, np.ndarray]:
    """Log price-index draws for the Cobb-Douglas vs the simple economy.

    Returns ``(ln Pi_CD, ln Pi_SE)`` per shock sample, where the
    Cobb-Douglas index routes the log shocks through the Leontief inverse
    and the simple economy uses the shares directly.  Used to exhibit the
    variance dilation caused by the granularity of the Leontief inverse.
    """
    m = np.asarray(m, dtype=float)
    M = np.eye(economy.n) - economy.A
    try:
        Lm = np.linalg.solve(M, m)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    logz = np.log(np.asarray(list(shocks), dtype=float))
    return -logz @ Lm, -logz @ m


def qq_points(samples) -> np.ndarray:
    """Normal QQ pairs for a sample, shape (N, 2).

    Samples are standardized to zero mean and unit (population) variance;
    the k-th theoretical quantile uses the plotting position (k - 0.5) / N.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size < 3:
        raise TooFewSamples(f"need at least 3 samples, got {samples.size}")
    sd = float(np.std(samples))
    if sd == 0:
        raise DegenerateSample("constant sample has no QQ representation")
    standardized = np.sort((samples - samples.mean()) / sd)
    k = np.arange(1, samples.size + 1)
    theoretical = norm.ppf((k - 0.5) / samples.size)
    return np.column_stack([theoretical, standardized])


def hp_filter(series, lam: float) -> tuple[np.ndarray, np.ndarray]:
    """Hodrick-Prescott trend/cycle split of a series.

    Solves the penalized least squares problem
    ``min sum (y - tau)^2 + lam * sum (second difference of tau)^2``
    exactly via the symmetric pentadiagonal system ``(I + lam K'K) tau = y``.
    """
    y = np.asarray(series, dtype=float)
    if y.ndim != 1 or y.size < 4:
        raise SeriesTooShort("HP filter needs a 1-d series of length >= 4")
    if not lam > 0:
        raise ValueError("lambda must be positive")
    T = y.size
    main = np.full(T, 6.0)
    main[[0, -1]] = 1.0
    main[[1, -2]] = 5.0
    off1 = np.full(T - 1, -4.0)
    off1[[0, -1]] = -2.0
    off2 = np.full(T - 2, 1.0)
    ab = np.zeros((3, T))
    ab[0] = 1.0 + lam * main
    ab[1, : T - 1] = lam * off1
    ab[2, : T - 2] = lam * off2
    trend = solveh_banded(ab, y, lower=True)
    return trend, y - trend
