"""Fixed-effects and 2SLS panel estimation of substitution elasticities.

The log cost-share regression is estimated within (entity demeaned) with
time dummies; the slope on log factor prices identifies gamma (and sigma =
1 - gamma), or kappa directly for the household expenditure regression.
Prices may be instrumented; diagnostics are the Cragg-Donald first-stage F,
the Sargan overidentification statistic and the Davidson-MacKinnon
endogeneity F.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from .errors import (
    GammaNearZero,
    RankDeficient,
    SingletonEntity,
    WeakInstrumentWarning,
)

LS_FE = "LS_FE"
IV_FE = "IV_FE"

#: Rule-of-thumb threshold below which the first stage is flagged as weak.
WEAK_INSTRUMENT_F = 10.0


@dataclass(frozen=True)
class PanelDataset:
    """Long-format panel of (factor, period) observations.

    ``y`` holds log shares, ``x`` log factor prices; ``instruments`` maps
    instrument names to columns aligned with the observations.  Rows with a
    nonfinite y, x or instrument value are dropped at construction.
    """

    entity: np.ndarray
    period: np.ndarray
    y: np.ndarray
    x: np.ndarray
    instruments: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        entity = np.asarray(self.entity)
        period = np.asarray(self.period)
        y = np.asarray(self.y, dtype=float)
        x = np.asarray(self.x, dtype=float)
        n = entity.shape[0]
        if not (period.shape == y.shape == x.shape == (n,)):
            raise ValueError("entity, period, y, x must share one length")
        instruments = {
            k: np.asarray(v, dtype=float) for k, v in self.instruments.items()
        }
        for k, v in instruments.items():
            if v.shape != (n,):
                raise ValueError(f"instrument {k!r} misaligned with observations")
        keep = np.isfinite(y) & np.isfinite(x)
        for v in instruments.values():
            keep &= np.isfinite(v)
        object.__setattr__(self, "entity", entity[keep])
        object.__setattr__(self, "period", period[keep])
        object.__setattr__(self, "y", y[keep])
        object.__setattr__(self, "x", x[keep])
        object.__setattr__(
            self, "instruments", {k: v[keep] for k, v in instruments.items()}
        )

    @property
    def nobs(self) -> int:
        return self.y.size

    @property
    def entities(self) -> np.ndarray:
        return np.unique(self.entity)

    @property
    def periods(self) -> np.ndarray:
        return np.unique(self.period)


@dataclass(frozen=True)
class IvDiagnostics:
    """IV regression diagnostics; sargan is None when just identified."""

    first_stage_f: float
    sargan: float | None
    sargan_p: float | None
    endogeneity_f: float
    endogeneity_p: float
    instruments: tuple[str, ...]


@dataclass(frozen=True)
class ElasticityEstimate:
    """FE regression result for gamma (production) or kappa (household)."""

    parameter: str  # "gamma" or "kappa"
    coef: float
    se: float
    time_dummies: np.ndarray  # coefficient of D_t relative to the base period
    dummy_periods: np.ndarray  # the periods t = 2..T those dummies belong to
    method: str  # LS_FE or IV_FE
    nobs: int
    n_entities: int
    diagnostics: IvDiagnostics | None = None

    @property
    def gamma_hat(self) -> float:
        return self.coef

    @property
    def sigma_hat(self) -> float | None:
        """1 - gamma for production runs; undefined for kappa runs."""
        if self.parameter != "gamma":
            return None
        return 1.0 - self.coef


def within_transform(panel: PanelDataset) -> PanelDataset:
    """Demean y, x and every instrument by entity over included periods."""
    demean = _entity_demeaner(panel.entity)
    return replace(
        panel,
        y=demean(panel.y),
        x=demean(panel.x),
        instruments={k: demean(v) for k, v in panel.instruments.items()},
    )


def _entity_demeaner(entity):
    codes, inverse = np.unique(entity, return_inverse=True)
    counts = np.bincount(inverse)
    if np.any(counts < 2):
        bad = codes[np.argmin(counts)]
        raise SingletonEntity(f"entity {bad!r} has fewer than 2 observations")

    def demean(v):
        means = np.bincount(inverse, weights=v) / counts
        return v - means[inverse]

    return demean


def _design(panel: PanelDataset):
    """Entity-demeaned response, regressors [x, D_2..D_T] and instruments."""
    demean = _entity_demeaner(panel.entity)
    periods = panel.periods
    if periods.size < 2:
        raise RankDeficient("need at least two periods for time dummies")
    dummies = np.column_stack(
        [(panel.period == t).astype(float) for t in periods[1:]]
    )
    y = demean(panel.y)
    x = demean(panel.x)
    D = np.column_stack([demean(col) for col in dummies.T])
    X = np.column_stack([x, D])
    n_entities = panel.entities.size
    return y, x, X, D, periods, n_entities


def _check_rank(M, what):
    if np.linalg.matrix_rank(M) < M.shape[1]:
        raise RankDeficient(f"{what} is rank deficient")


def fe_ols(panel: PanelDataset, parameter: str = "gamma") -> ElasticityEstimate:
    """Within (FE) least squares of demeaned y on demeaned [x, time dummies].

    Standard errors use the fixed-effects degrees of freedom
    ``nobs - n_entities - k``.
    """
    y, _, X, _, periods, n_entities = _design(panel)
    _check_rank(X, "FE design matrix")
    beta, cov = _ols_fit(y, X, dof=panel.nobs - n_entities - X.shape[1])
    return ElasticityEstimate(
        parameter=parameter,
        coef=float(beta[0]),
        se=float(np.sqrt(cov[0, 0])),
        time_dummies=beta[1:].copy(),
        dummy_periods=periods[1:].copy(),
        method=LS_FE,
        nobs=panel.nobs,
        n_entities=n_entities,
    )


def fe_2sls(
    panel: PanelDataset,
    instrument_spec: list[str],
    parameter: str = "gamma",
) -> ElasticityEstimate:
    """Within 2SLS with x instrumented and time dummies exogenous.

    Warns WeakInstrumentWarning when the first-stage F falls below 10.
    Diagnostics (first-stage F, Sargan when overidentified, Davidson-
    MacKinnon endogeneity F) are attached to the estimate.
    """
    if not instrument_spec:
        raise ValueError("need at least one instrument")
    missing = [k for k in instrument_spec if k not in panel.instruments]
    if missing:
        raise ValueError(f"unknown instruments: {missing}")
    y, x, X, D, periods, n_entities = _design(panel)
    demean = _entity_demeaner(panel.entity)
    V = np.column_stack([demean(panel.instruments[k]) for k in instrument_spec])
    Z = np.column_stack([V, D])
    _check_rank(X, "FE design matrix")
    _check_rank(Z, "instrument matrix")

    k = X.shape[1]
    dof = panel.nobs - n_entities - k
    ZtZinv_Ztx = np.linalg.lstsq(Z, X, rcond=None)[0]
    Xhat = Z @ ZtZinv_Ztx
    XtPX = X.T @ Xhat
    try:
        XtPX_inv = np.linalg.inv(XtPX)
    except np.linalg.LinAlgError as exc:
        raise RankDeficient(f"projected design is singular: {exc}") from exc
    beta = XtPX_inv @ (Xhat.T @ y)
    resid = y - X @ beta
    s2 = float(resid @ resid) / dof
    cov = s2 * XtPX_inv

    diag = iv_diagnostics(panel, instrument_spec, beta_2sls=beta)
    if diag.first_stage_f < WEAK_INSTRUMENT_F:
        warnings.warn(
            f"first-stage F = {diag.first_stage_f:.2f} below "
            f"{WEAK_INSTRUMENT_F:g}",
            WeakInstrumentWarning,
            stacklevel=2,
        )
    return ElasticityEstimate(
        parameter=parameter,
        coef=float(beta[0]),
        se=float(np.sqrt(cov[0, 0])),
        time_dummies=beta[1:].copy(),
        dummy_periods=periods[1:].copy(),
        method=IV_FE,
        nobs=panel.nobs,
        n_entities=n_entities,
        diagnostics=diag,
    )


def iv_diagnostics(
    panel: PanelDataset,
    instrument_spec: list[str],
    beta_2sls=None,
) -> IvDiagnostics:
    """First-stage (Cragg-Donald) F, Sargan statistic and endogeneity F.

    With one endogenous regressor the Cragg-Donald statistic reduces to the
    F of excluded instruments in the first stage after partialling out the
    exogenous time dummies.  Sargan is N R^2 of the 2SLS residuals on the
    full instrument set (chi-square with L - 1 dof), reported as None when
    just identified.  The endogeneity test augments the structural OLS with
    the first-stage residuals (Davidson-MacKinnon F with 1 numerator dof).
    """
    y, x, X, D, _, n_entities = _design(panel)
    demean = _entity_demeaner(panel.entity)
    V = np.column_stack([demean(panel.instruments[k]) for k in instrument_spec])
    Z = np.column_stack([V, D])
    n = panel.nobs
    L = V.shape[1]

    # First-stage F: partial the dummies out of x and the excluded
    # instruments, then test the joint significance of the instruments.
    x_t = _residualize(x, D)
    V_t = np.column_stack([_residualize(col, D) for col in V.T])
    fitted = V_t @ np.linalg.lstsq(V_t, x_t, rcond=None)[0]
    rss = float(((x_t - fitted) ** 2).sum())
    ess = float((fitted**2).sum())
    dof_fs = n - n_entities - D.shape[1] - L
    first_stage_f = (ess / L) / (rss / dof_fs)

    # 2SLS residuals for the Sargan and endogeneity statistics.
    if beta_2sls is None:
        Xhat = Z @ np.linalg.lstsq(Z, X, rcond=None)[0]
        beta_2sls = np.linalg.solve(X.T @ Xhat, Xhat.T @ y)
    u = y - X @ beta_2sls

    if L > 1:
        u_fit = Z @ np.linalg.lstsq(Z, u, rcond=None)[0]
        r2 = float(u_fit @ u_fit) / float(u @ u)
        # Entity demeaning removes one dimension per entity, so the
        # effective sample size of the N R^2 statistic is n - n_entities;
        # using raw n makes the test over-reject in short panels.
        sargan = (n - n_entities) * r2
        sargan_p = float(stats.chi2.sf(sargan, L - 1))
    else:
        sargan = None
        sargan_p = None

    # Davidson-MacKinnon: add the first-stage residuals to the OLS
    # regression; their significance signals endogeneity of x.
    v_hat = x - Z @ np.linalg.lstsq(Z, x, rcond=None)[0]
    if np.linalg.norm(v_hat) <= 1e-10 * max(np.linalg.norm(x), 1.0):
        # The instruments predict x exactly, so there is no first-stage
        # residual to test; x is exogenous by construction.
        endogeneity_f = 0.0
        endogeneity_p = 1.0
    else:
        X_aug = np.column_stack([X, v_hat])
        dof_aug = n - n_entities - X_aug.shape[1]
        beta_aug, cov_aug = _ols_fit(y, X_aug, dof=dof_aug)
        t_v = beta_aug[-1] / np.sqrt(cov_aug[-1, -1])
        endogeneity_f = float(t_v**2)
        endogeneity_p = float(stats.f.sf(endogeneity_f, 1, dof_aug))

    return IvDiagnostics(
        first_stage_f=float(first_stage_f),
        sargan=None if sargan is None else float(sargan),
        sargan_p=sargan_p,
        endogeneity_f=endogeneity_f,
        endogeneity_p=endogeneity_p,
        instruments=tuple(instrument_spec),
    )


def household_regression(
    panel: PanelDataset,
    instrument_spec: list[str] | None = None,
) -> ElasticityEstimate:
    """Expenditure-share regression: the slope on log prices is kappa.

    Same machinery as the production regression, but the coefficient is the
    utility curvature itself rather than 1 - sigma.
    """
    if instrument_spec:
        return fe_2sls(panel, instrument_spec, parameter="kappa")
    return fe_ols(panel, parameter="kappa")


def recover_productivity(estimate: ElasticityEstimate, output_prices) -> np.ndarray:
    """Cumulative log productivity ``ln zeta_t / zeta_1`` from time dummies.

    ``-(mu_t - mu_1) / gamma - ln(p_t / p_1)`` with the first element zero;
    ``output_prices`` aligns with the base period followed by the dummy
    periods.
    """
    if estimate.parameter != "gamma":
        raise ValueError("productivity recovery needs a gamma estimate")
    gamma = estimate.coef
    if abs(gamma) < 1e-6:
        raise GammaNearZero("recovery is singular at the Cobb-Douglas point")
    p = np.asarray(output_prices, dtype=float)
    T = estimate.time_dummies.size + 1
    if p.shape != (T,):
        raise ValueError(f"output prices have shape {p.shape}, expected ({T},)")
    if np.any(p <= 0):
        raise ValueError("output prices must be positive")
    mu_diff = np.concatenate(([0.0], estimate.time_dummies))
    return -mu_diff / gamma - np.log(p / p[0])


def apply_instrument_transform(panel: PanelDataset, token: str) -> tuple[str, PanelDataset]:
    """Materialize a named instrument transform as a new column.

    ``token`` is an instrument name optionally prefixed by ``l`` (first
    lag), ``f`` (first forward) or ``d`` (first difference).  Transformed
    cells without a neighbour period become NaN and are masked out by the
    PanelDataset constructor on rebuild.  Returns the resolved column name
    and the extended dataset.
    """
    transform = None
    name = token
    if token not in panel.instruments and token[:1] in ("l", "f", "d"):
        transform, name = token[0], token[1:]
    if name not in panel.instruments:
        raise ValueError(f"unknown instrument {token!r}")
    if transform is None:
        return name, panel
    col_name = f"{transform}_{name}"
    if col_name in panel.instruments:
        return col_name, panel
    base = panel.instruments[name]
    out = np.full(panel.nobs, np.nan)
    for ent in panel.entities:
        idx = np.flatnonzero(panel.entity == ent)
        order = idx[np.argsort(panel.period[idx])]
        v = base[order]
        if transform == "l":
            out[order[1:]] = v[:-1]
        elif transform == "f":
            out[order[:-1]] = v[1:]
        else:  # first difference
            out[order[1:]] = v[1:] - v[:-1]
    instruments = dict(panel.instruments)
    instruments[col_name] = out
    return col_name, PanelDataset(
        entity=panel.entity,
        period=panel.period,
        y=panel.y,
        x=panel.x,
        instruments=instruments,
    )


def _residualize(v, basis):
    return v - basis @ np.linalg.lstsq(basis, v, rcond=None)[0]


def _ols_fit(y, X, dof):
    if dof <= 0:
        raise RankDeficient("no residual degrees of freedom")
    beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        raise RankDeficient("design matrix is rank deficient")
    resid = y - X @ beta
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(X.T @ X)
    return beta, cov
