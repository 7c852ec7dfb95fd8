"""Command-line frontend: solve, structure, aggregate, simulate, qq, hp,
gbm, estimate and the batch experiment driver.

Configuration precedence is flags > config file > defaults; the config file
is a flat ``key = value`` text file whose keys match the long option names
(with dashes replaced by underscores).  All randomness flows from a single
``--seed`` with a fixed default, so published runs are reproducible.

Exit codes: 0 on success, 1 on domain errors (reported as a JSON object on
standard error), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import economy as econ
from . import econometrics as em
from . import equilibrium as eq
from . import gbm as gbm_mod
from . import montecarlo as mc
from . import structure as struct_mod
from .errors import CesnetError, MalformedTable
from .household import METHODS, HouseholdPrefs, Unviable, real_gdp_growth

DEFAULT_SEED = 20110101


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    config = _load_config_from_argv(argv)
    parser = _build_parser(config)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CesnetError as exc:
        json.dump(
            {"error": type(exc).__name__, "message": str(exc)},
            sys.stderr,
            sort_keys=True,
        )
        sys.stderr.write("\n")
        return 1


# --- configuration ----------------------------------------------------------

def _load_config_from_argv(argv):
    if "--config" not in argv:
        return {}
    path = argv[argv.index("--config") + 1]
    return load_config(path)


def load_config(path) -> dict:
    """Parse a flat ``key = value`` config file into a string dict."""
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise MalformedTable(f"config line without '=': {line!r}")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _build_parser(config):
    parser = argparse.ArgumentParser(
        prog="cesnet",
        description="Multisector CES production-network toolkit",
    )
    parser.add_argument("--config", help="flat key=value config file")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        return p

    def opt(p, flag, **kwargs):
        dest = flag.lstrip("-").replace("-", "_")
        if dest in config:
            typ = kwargs.get("type", str)
            kwargs["default"] = typ(config[dest])
        p.add_argument(flag, **kwargs)

    def economy_opts(p):
        opt(p, "--economy", required="economy" not in config,
            help="IO table CSV")
        opt(p, "--elasticities", required="elasticities" not in config,
            help="sector elasticities CSV (label,sigma)")

    def prefs_opts(p):
        opt(p, "--prefs", required="prefs" not in config,
            help="expenditure shares CSV (label,mu)")
        opt(p, "--kappa", type=float, default=0.0,
            help="household utility curvature (default 0, Cobb-Douglas)")

    p = add("solve", _cmd_solve, "solve equilibrium prices for a shock")
    economy_opts(p)
    opt(p, "--shocks", help="shock CSV (label,z); defaults to the benchmark")
    opt(p, "--pi0", type=float, default=1.0)
    opt(p, "--tol", type=float, default=1e-10)
    opt(p, "--max-iter", type=int, default=10000)
    opt(p, "--outdir", default=".")

    p = add("structure", _cmd_structure, "equilibrium structure and viability")
    economy_opts(p)
    opt(p, "--shocks", help="shock CSV (label,z)")
    opt(p, "--pi0", type=float, default=1.0)
    opt(p, "--outdir", default=".")

    p = add("aggregate", _cmd_aggregate, "real GDP growth for one shock")
    economy_opts(p)
    prefs_opts(p)
    opt(p, "--shocks", required="shocks" not in config, help="shock CSV")
    opt(p, "--method", choices=METHODS, default="general-ces")

    p = add("simulate", _cmd_simulate, "Monte Carlo fluctuation distribution")
    economy_opts(p)
    prefs_opts(p)
    opt(p, "--method", choices=METHODS, default="general-ces")
    opt(p, "--count", type=int, default=10000)
    opt(p, "--sigma", type=float, default=0.2)
    opt(p, "--seed", type=int, default=DEFAULT_SEED)
    opt(p, "--workers", type=int, default=1)
    opt(p, "--outdir", default=".")

    p = add("qq", _cmd_qq, "normal QQ points of a sample CSV")
    opt(p, "--input", required="input" not in config,
        help="one-column CSV of samples")
    opt(p, "--outdir", default=".")

    p = add("hp", _cmd_hp, "Hodrick-Prescott trend/cycle split")
    opt(p, "--input", required="input" not in config,
        help="one-column CSV series")
    opt(p, "--lam", type=float, default=1600.0)
    opt(p, "--outdir", default=".")

    p = add("gbm", _cmd_gbm, "GBM drift/volatility and normality per column")
    opt(p, "--input", required="input" not in config,
        help="CSV, one series per column with a header row")
    opt(p, "--outdir", default=".")

    p = add("estimate", _cmd_estimate, "FE / IV panel elasticity estimation")
    opt(p, "--panel", required="panel" not in config,
        help="long CSV: entity,period,share,price[,inst_*...]")
    opt(p, "--method", choices=("ls", "iv"), default="ls")
    opt(p, "--iv", default="",
        help="comma-separated instrument tokens, e.g. a,lb (l/f/d prefixes "
             "are lag/forward/difference)")
    opt(p, "--parameter", choices=("gamma", "kappa"), default="gamma")
    opt(p, "--out", help="write the estimate JSON here instead of stdout")

    p = add("experiment", _cmd_experiment,
            "paired-sample comparison of the three aggregators")
    economy_opts(p)
    prefs_opts(p)
    opt(p, "--count", type=int, default=10000)
    opt(p, "--sigma", type=float, default=0.2)
    opt(p, "--seed", type=int, default=DEFAULT_SEED)
    opt(p, "--workers", type=int, default=1)
    opt(p, "--outdir", default=".")

    return parser


# --- shared IO helpers ------------------------------------------------------

def _load_economy(args):
    return econ.load_economy(args.economy, args.elasticities)


def _load_labelled_vector(path, labels, what):
    rows = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for idx, row in enumerate(csv.reader(fh)):
            if not row or not any(c.strip() for c in row):
                continue
            if len(row) != 2:
                raise MalformedTable(f"{what} row {idx} needs 2 fields")
            try:
                rows[row[0].strip()] = float(row[1])
            except ValueError:
                if idx == 0:
                    continue
                raise MalformedTable(f"non-numeric {what} value in row {idx}")
    missing = [lab for lab in labels if lab not in rows]
    if missing:
        raise MalformedTable(f"{what} missing for sectors: {missing}")
    return np.array([rows[lab] for lab in labels])


def _load_shocks(args, economy):
    if getattr(args, "shocks", None):
        return _load_labelled_vector(args.shocks, economy.labels, "shock")
    return np.ones(economy.n)


def _load_prefs(args, economy):
    mu = _load_labelled_vector(args.prefs, economy.labels, "mu")
    return HouseholdPrefs(mu=mu, kappa=args.kappa)


def _load_column(path):
    values = []
    with open(path, newline="", encoding="utf-8") as fh:
        for idx, row in enumerate(csv.reader(fh)):
            if not row or not row[0].strip():
                continue
            try:
                values.append(float(row[0]))
            except ValueError:
                if idx == 0:
                    continue
                raise MalformedTable(f"non-numeric value in row {idx}")
    return np.asarray(values)


def _fmt(v) -> str:
    """Shortest round-trip decimal form of a float."""
    return repr(float(v))


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path, payload):
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def _outdir(args) -> Path:
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# --- subcommands ------------------------------------------------------------

def _cmd_solve(args) -> int:
    economy = _load_economy(args)
    z = _load_shocks(args, economy)
    result = eq.solve_fixed_point(
        economy, z, pi0=args.pi0, tol=args.tol, max_iter=args.max_iter
    )
    out = _outdir(args)
    meta = {
        "status": result.status,
        "iterations": result.iterations,
        "residual": result.residual,
        "tol": args.tol,
    }
    _write_json(out / "solve_meta.json", meta)
    if not result.converged:
        json.dump(
            {"error": "NotConverged", "message": f"status {result.status}"},
            sys.stderr, sort_keys=True,
        )
        sys.stderr.write("\n")
        return 1
    _write_csv(
        out / "prices.csv",
        ["label", "price"],
        [[lab, _fmt(p)] for lab, p in zip(economy.labels, result.pi)],
    )
    return 0

def _cmd_structure(args) -> int:
    economy = _load_economy(args)
    z = _load_shocks(args, economy)
    result = eq.solve_fixed_point(economy, z, pi0=args.pi0)
    if not result.converged:
        json.dump(
            {"error": "NotConverged", "message": f"status {result.status}"},
            sys.stderr, sort_keys=True,
        )
        sys.stderr.write("\n")
        return 1
    structure = struct_mod.equilibrium_structure(
        economy, result.pi, args.pi0, z
    )
    out = _outdir(args)
    header = ["input", *economy.labels]
    _write_csv(
        out / "b_matrix.csv", header,
        [["PRIMARY", *map(_fmt, structure.b0)]]
        + [[lab, *map(_fmt, structure.B[i])]
           for i, lab in enumerate(economy.labels)],
    )
    _write_csv(
        out / "s_matrix.csv", header[:1] + list(economy.labels),
        [[lab, *map(_fmt, structure.S[i])]
         for i, lab in enumerate(economy.labels)],
    )
    _write_json(out / "structure.json", {
        "viable": structure.viable,
        "iterations": result.iterations,
        "residual": result.residual,
    })
    return 0


def _cmd_aggregate(args) -> int:
    economy = _load_economy(args)
    prefs = _load_prefs(args, economy)
    z = _load_shocks(args, economy)
    growth = real_gdp_growth(economy, prefs, z, method=args.method)
    if isinstance(growth, Unviable):
        json.dump(
            {"error": "Unviable", "message":
             f"no positive equilibrium under method {growth.method!r}"},
            sys.stderr, sort_keys=True,
        )
        sys.stderr.write("\n")
        return 1
    json.dump({"ln_h": growth, "method": args.method}, sys.stdout,
              sort_keys=True)
    sys.stdout.write("\n")
    return 0


def _cmd_simulate(args) -> int:
    economy = _load_economy(args)
    prefs = _load_prefs(args, economy)
    config = mc.ShockConfig(count=args.count, sigma=args.sigma, seed=args.seed)
    summary = mc.simulate_distribution(
        economy, prefs, config, method=args.method, workers=args.workers
    )
    out = _outdir(args)
    _write_summary_files(out, args.method, summary)
    return 0


def _write_summary_files(out, method, summary):
    tag = method.replace("-", "_")
    _write_json(out / f"summary_{tag}.json", summary.to_dict())
    _write_csv(out / f"samples_{tag}.csv", ["ln_h"],
               [[_fmt(v)] for v in summary.samples])
    # QQ points need at least 3 distinct draws; tiny runs still get a
    # valid summary and sample file.
    if summary.samples.size >= 3 and np.ptp(summary.samples) > 0:
        pairs = mc.qq_points(summary.samples)
        _write_csv(out / f"qq_{tag}.csv", ["theoretical", "sample"],
                   [[_fmt(a), _fmt(b)] for a, b in pairs])


def _cmd_qq(args) -> int:
    samples = _load_column(args.input)
    pairs = mc.qq_points(samples)
    out = _outdir(args)
    _write_csv(out / "qq.csv", ["theoretical", "sample"],
               [[_fmt(a), _fmt(b)] for a, b in pairs])
    return 0


def _cmd_hp(args) -> int:
    series = _load_column(args.input)
    trend, cycle = mc.hp_filter(series, args.lam)
    out = _outdir(args)
    _write_csv(out / "hp.csv", ["trend", "cycle"],
               [[_fmt(t), _fmt(c)] for t, c in zip(trend, cycle)])
    return 0


def _cmd_gbm(args) -> int:
    names, columns = _load_table_columns(args.input)
    rows = []
    for name, series in zip(names, columns):
        moments = gbm_mod.estimate_gbm_moments(series)
        dlm = gbm_mod.estimate_gbm_dlm(series)
        growth = np.diff(np.log(series))
        w, p = gbm_mod.shapiro_wilk(growth)
        rows.append([
            name,
            _fmt(moments.mu_hat), _fmt(moments.sigma_hat),
            _fmt(dlm.mu_hat), _fmt(dlm.sigma_hat),
            _fmt(w), _fmt(p),
            "yes" if p >= 0.05 else "no",
        ])
    out = _outdir(args)
    _write_csv(
        out / "gbm.csv",
        ["series", "mu_moments", "sigma_moments", "mu_dlm", "sigma_dlm",
         "sw_w", "sw_p", "normal_5pct"],
        rows,
    )
    return 0


def _load_table_columns(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if len(rows) < 2:
        raise MalformedTable("need a header row and data rows")
    names = [c.strip() for c in rows[0]]
    try:
        data = np.array([[float(c) for c in row] for row in rows[1:]])
    except ValueError as exc:
        raise MalformedTable(f"non-numeric table cell: {exc}") from exc
    if data.shape[1] != len(names):
        raise MalformedTable("ragged table")
    return names, data.T


def _cmd_estimate(args) -> int:
    panel, inst_names = _load_panel(args.panel)
    tokens = [t.strip() for t in args.iv.split(",") if t.strip()]
    resolved = []
    for token in tokens:
        name, panel = em.apply_instrument_transform(panel, token)
        resolved.append(name)
    if args.method == "iv":
        if not resolved:
            raise MalformedTable("IV estimation needs --iv instruments")
        estimate = em.fe_2sls(panel, resolved, parameter=args.parameter)
    else:
        estimate = em.fe_ols(panel, parameter=args.parameter)
    payload = _estimate_payload(estimate)
    if args.out:
        _write_json(args.out, payload)
    else:
        json.dump(payload, sys.stdout, sort_keys=True, indent=2)
        sys.stdout.write("\n")
    return 0


def _estimate_payload(estimate):
    payload = {
        "parameter": estimate.parameter,
        "coef": estimate.coef,
        "se": estimate.se,
        "method": estimate.method,
        "nobs": estimate.nobs,
        "n_entities": estimate.n_entities,
        "time_dummies": {
            str(t): float(v)
            for t, v in zip(estimate.dummy_periods, estimate.time_dummies)
        },
    }
    if estimate.parameter == "gamma":
        payload["sigma_hat"] = estimate.sigma_hat
        payload["sigma_se"] = estimate.se
    d = estimate.diagnostics
    if d is not None:
        payload["diagnostics"] = {
            "first_stage_f": d.first_stage_f,
            "sargan": d.sargan,
            "sargan_p": d.sargan_p,
            "endogeneity_f": d.endogeneity_f,
            "endogeneity_p": d.endogeneity_p,
            "instruments": list(d.instruments),
        }
    return payload


def _load_panel(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if len(rows) < 2:
        raise MalformedTable("panel CSV needs a header and data rows")
    header = [c.strip() for c in rows[0]]
    if header[:4] != ["entity", "period", "share", "price"]:
        raise MalformedTable(
            "panel header must start with entity,period,share,price"
        )
    inst_cols = header[4:]
    inst_names = [c[5:] if c.startswith("inst_") else c for c in inst_cols]
    entity, period, share, price = [], [], [], []
    inst_data = {name: [] for name in inst_names}
    for idx, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise MalformedTable(f"panel row {idx} has {len(row)} fields")
        entity.append(row[0].strip())
        period.append(int(row[1]))
        share.append(float(row[2]))
        price.append(float(row[3]))
        for name, cell in zip(inst_names, row[4:]):
            inst_data[name].append(float(cell))
    share = np.asarray(share)
    price = np.asarray(price)
    # Zero shares have no log; NaN rows are masked by the constructor.
    with np.errstate(divide="ignore", invalid="ignore"):
        y = np.where(share > 0, np.log(np.where(share > 0, share, 1.0)), np.nan)
        x = np.log(price)
    panel = em.PanelDataset(
        entity=np.asarray(entity),
        period=np.asarray(period),
        y=y,
        x=x,
        instruments={k: np.asarray(v) for k, v in inst_data.items()},
    )
    return panel, inst_names


def _cmd_experiment(args) -> int:
    economy = _load_economy(args)
    prefs = _load_prefs(args, economy)
    config = mc.ShockConfig(count=args.count, sigma=args.sigma, seed=args.seed)
    out = _outdir(args)

    report = {"seed": args.seed, "count": args.count, "sigma": args.sigma,
              "methods": {}}
    hashes = set()
    for method in METHODS:
        digest = hashlib.sha256()
        for z in mc.sample_shocks(economy.n, config):
            digest.update(z.tobytes())
        shock_hash = digest.hexdigest()
        hashes.add(shock_hash)
        entry = {"shock_stream_sha256": shock_hash}
        try:
            summary = mc.simulate_distribution(
                economy, prefs, config, method=method, workers=args.workers
            )
        except CesnetError as exc:
            entry["failed"] = type(exc).__name__
            entry["message"] = str(exc)
        else:
            entry.update(summary.to_dict())
            _write_summary_files(out, method, summary)
        report["methods"][method] = entry
    if len(hashes) != 1:
        raise AssertionError("shock streams differed across methods")
    means = {
        m: e["mean"] for m, e in report["methods"].items() if "mean" in e
    }
    report["mean_ordering"] = sorted(means, key=means.get)
    _write_json(out / "report.json", report)
    return 0


if __name__ == "__main__":
    sys.exit(main())
