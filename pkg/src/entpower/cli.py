"""Command-line front end.

Subcommands map one-to-one onto the experiment kinds (ep-curve,
opent-curve, form-factor with --moment, asymptotic) plus `table` for
the closed-form values, `verify` for statistically gated reproduction
runs, and `fit` for the form-factor model of the CUE entropy curve.

Flag values override config-file values (--config, flat JSON keyed by
flag names); defaults fill the rest.  --seed falls back to the
RMT_SEED environment variable, then 0.  Exit codes: 0 pass, 1
statistical gate failure, 2 usage or config error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .closedform import (
    CaseTag,
    cue_form_factor,
    cue_fourth_moment,
    ep1,
    ep_inf,
    fit_form_factor_model,
    model_prediction,
    op_ent_cue,
)
from .dynamics import EntropySeries
from .ensembles import EnsembleTag
from .montecarlo import (
    ConfigError,
    ExperimentConfig,
    ExperimentKind,
    ResultRow,
    ResultTable,
    StateMode,
    run_experiment,
    z_score,
)

__all__ = [
    "CliInvocation",
    "parse_invocation",
    "emit_results",
    "table_to_csv",
    "table_to_json",
    "table_from_json",
    "main",
]

_STATE_MODES = {
    "fixed": StateMode.FIXED_PRODUCT,
    "random-complex": StateMode.RANDOM_COMPLEX_PRODUCT,
    "random-real": StateMode.RANDOM_REAL_PRODUCT,
}
_ENSEMBLES = {"cue": EnsembleTag.CUE, "coe": EnsembleTag.COE}
_DEFAULT_SAMPLES = 100_000


@dataclass
class CliInvocation:
    subcommand: str
    flags: dict
    config_path: str | None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entpower",
        description="Monte Carlo curves and closed-form checks for the "
                    "entangling power of iterated CUE/COE unitaries.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, *, state: bool, nmax: bool = True):
        sp.add_argument("--da", type=int, help="subsystem A dimension")
        sp.add_argument("--db", type=int, help="subsystem B dimension")
        if nmax:
            sp.add_argument("--nmax", type=int, help="largest iteration count (default 2*da*db)")
        sp.add_argument("--samples", type=int, help=f"Monte Carlo samples (default {_DEFAULT_SAMPLES})")
        sp.add_argument("--seed", type=int, help="master seed (default: RMT_SEED env, then 0)")
        sp.add_argument("--ensemble", choices=sorted(_ENSEMBLES))
        if state:
            sp.add_argument("--state", choices=sorted(_STATE_MODES),
                            help="initial product state mode (default fixed)")
        sp.add_argument("--parallelism", type=int, help="worker processes (default 1)")
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--format", choices=["csv", "json"])
        sp.add_argument("--config", help="flat JSON file with flag-name keys")

    sp = sub.add_parser("ep-curve", help="mean linear entropy of U^n psi vs n")
    add_common(sp, state=True)
    sp = sub.add_parser("opent-curve", help="mean operator entanglement of U^n vs n")
    add_common(sp, state=False)
    sp = sub.add_parser("form-factor", help="mean |tr U^n|^2 (or ^4) vs n")
    add_common(sp, state=False)
    sp.add_argument("--moment", type=int, choices=[2, 4], help="trace moment (default 2)")
    sp = sub.add_parser("asymptotic", help="mean infinite-time entropy (single row, n = -1)")
    add_common(sp, state=True, nmax=False)
    sp.add_argument("--time-average-n", type=int,
                    help="steps for the direct-average fallback (default 100000)")

    sp = sub.add_parser("table", help="closed-form reference values for given dims")
    sp.add_argument("--da", type=int)
    sp.add_argument("--db", type=int)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=["csv", "json"])
    sp.add_argument("--config", help="flat JSON file with flag-name keys")

    sp = sub.add_parser("verify", help="run an experiment and gate it against closed forms")
    add_common(sp, state=True)
    sp.add_argument("--kind", choices=["ep-curve", "opent-curve", "form-factor", "asymptotic"])
    sp.add_argument("--moment", type=int, choices=[2, 4])
    sp.add_argument("--gate-sigma", type=float, help="|z| threshold (default 5.0)")
    sp.add_argument("--time-average-n", type=int)

    sp = sub.add_parser("fit", help="least-squares form-factor model of the CUE ep-curve")
    add_common(sp, state=True)
    return parser


def parse_invocation(argv: list[str]) -> CliInvocation:
    ns = build_parser().parse_args(argv)
    flags = {k: v for k, v in vars(ns).items() if k not in ("command", "config")}
    return CliInvocation(ns.command, flags, getattr(ns, "config", None))


def _merged_options(inv: CliInvocation) -> dict:
    merged = dict(inv.flags)
    if inv.config_path is None:
        return {k: v for k, v in merged.items() if v is not None}
    with open(inv.config_path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {inv.config_path} must hold a JSON object")
    for key, value in raw.items():
        dest = key.replace("-", "_")
        if dest not in merged:
            raise ConfigError(f"config key {key!r} is not a flag of subcommand {inv.subcommand!r}")
        if merged[dest] is None:
            merged[dest] = value
    return {k: v for k, v in merged.items() if v is not None}


def _default_seed() -> int:
    env = os.environ.get("RMT_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"RMT_SEED must be an integer, got {env!r}") from None


def _experiment_config(kind: ExperimentKind, opts: dict) -> ExperimentConfig:
    da, db = opts.get("da"), opts.get("db")
    if da is None or db is None:
        raise ConfigError("--da and --db are required")
    if kind is ExperimentKind.ASYMPTOTIC:
        n_max = 1
    else:
        n_max = opts.get("nmax", 2 * da * db)
    state = StateMode.NONE
    if kind in (ExperimentKind.EP_CURVE, ExperimentKind.ASYMPTOTIC):
        state = _STATE_MODES[opts.get("state", "fixed")]
    return ExperimentConfig(
        kind=kind,
        ensemble=_ENSEMBLES[opts.get("ensemble", "cue")],
        state_mode=state,
        d_a=da,
        d_b=db,
        n_max=n_max,
        samples=opts.get("samples", _DEFAULT_SAMPLES),
        master_seed=opts.get("seed", _default_seed()),
        time_average_n=opts.get("time_average_n", 100_000),
    )


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def table_to_csv(table: ResultTable) -> str:
    lines = ["n,mean,stderr,count"]
    for row in table.rows:
        lines.append(f"{row.n},{_fmt(row.mean)},{_fmt(row.stderr)},{row.count}")
    return "\n".join(lines) + "\n"


def table_to_json(table: ResultTable) -> str:
    payload = {
        "metadata": table.metadata,
        "rows": [{"n": r.n, "mean": r.mean, "stderr": r.stderr, "count": r.count}
                 for r in table.rows],
    }
    return json.dumps(payload, indent=2) + "\n"


def table_from_json(text: str) -> ResultTable:
    obj = json.loads(text)
    rows = [ResultRow(r["n"], r["mean"], r["stderr"], r["count"]) for r in obj["rows"]]
    return ResultTable(rows, obj["metadata"])


def _write_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def emit_results(table: ResultTable, fmt: str, out: str | None) -> None:
    """Serialize a result table as CSV (rows only) or JSON (with metadata)."""
    if fmt == "json":
        _write_text(table_to_json(table), out)
    elif fmt == "csv":
        _write_text(table_to_csv(table), out)
    else:
        raise ConfigError(f"unknown format {fmt!r}")


_COMMAND_KINDS = {
    "ep-curve": ExperimentKind.EP_CURVE,
    "opent-curve": ExperimentKind.OPENT_CURVE,
    "form-factor": ExperimentKind.FORM_FACTOR,
    "asymptotic": ExperimentKind.ASYMPTOTIC,
}


def _resolve_kind(name: str, opts: dict) -> ExperimentKind:
    kind = _COMMAND_KINDS[name]
    if kind is ExperimentKind.FORM_FACTOR and opts.get("moment", 2) == 4:
        return ExperimentKind.FOURTH_MOMENT
    return kind


def _cmd_experiment(inv: CliInvocation, opts: dict) -> int:
    cfg = _experiment_config(_resolve_kind(inv.subcommand, opts), opts)
    table = run_experiment(cfg, parallelism=opts.get("parallelism", 1))
    emit_results(table, opts.get("format", "csv"), opts.get("out"))
    return 0


def _closed_forms(da: int, db: int) -> list[tuple[str, Fraction]]:
    return [
        ("ep1_a", ep1(CaseTag.A_CUE_COMPLEX, da, db)),
        ("ep1_bc", ep1(CaseTag.B_COE_COMPLEX, da, db)),
        ("opent_cue", op_ent_cue(da, db)),
        ("epinf_a", ep_inf(CaseTag.A_CUE_COMPLEX, da, db)),
        ("epinf_b", ep_inf(CaseTag.B_COE_COMPLEX, da, db)),
        ("epinf_c", ep_inf(CaseTag.C_COE_REAL, da, db)),
    ]


def _cmd_table(opts: dict) -> int:
    da, db = opts.get("da"), opts.get("db")
    if da is None or db is None:
        raise ConfigError("--da and --db are required")
    values = _closed_forms(da, db)
    if opts.get("format", "csv") == "json":
        payload = {
            "d_a": da,
            "d_b": db,
            "values": {
                name: {"numerator": v.numerator, "denominator": v.denominator,
                       "value": float(v)}
                for name, v in values
            },
        }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = ["quantity,numerator,denominator,value"]
        for name, v in values:
            lines.append(f"{name},{v.numerator},{v.denominator},{_fmt(float(v))}")
        text = "\n".join(lines) + "\n"
    _write_text(text, opts.get("out"))
    return 0


def _verify_targets(cfg: ExperimentConfig) -> list[tuple[int, str, Fraction | int]] | None:
    """Anchor rows with closed-form targets for a config, None if unsupported."""
    da, db, d = cfg.d_a, cfg.d_b, cfg.d_a * cfg.d_b
    case = cfg.case_tag()
    if cfg.kind is ExperimentKind.EP_CURVE:
        if cfg.ensemble is EnsembleTag.CUE:
            targets = [(1, "ep1(a)", ep1(CaseTag.A_CUE_COMPLEX, da, db))]
            targets += [(n, "epinf(a)", ep_inf(CaseTag.A_CUE_COMPLEX, da, db))
                        for n in range(d, cfg.n_max + 1)]
            return targets
        if case is None:
            return None
        # COE curves approach their asymptote smoothly, so only n = 1
        # carries an exact finite-n value
        return [(1, "ep1(b,c)", ep1(case, da, db))]
    if cfg.kind is ExperimentKind.OPENT_CURVE:
        if cfg.ensemble is EnsembleTag.CUE:
            return [(1, "opent_cue", op_ent_cue(da, db))]
        return None
    if cfg.kind is ExperimentKind.FORM_FACTOR:
        if cfg.ensemble is EnsembleTag.CUE:
            return [(n, "form_factor", cue_form_factor(n, d)) for n in range(1, cfg.n_max + 1)]
        return None
    if cfg.kind is ExperimentKind.FOURTH_MOMENT:
        if cfg.ensemble is EnsembleTag.CUE:
            return [(n, "fourth_moment", cue_fourth_moment(n, d)) for n in range(1, cfg.n_max + 1)]
        return None
    if case is None:
        return None
    return [(-1, f"epinf({case.value})", ep_inf(case, da, db))]


def _cmd_verify(opts: dict) -> int:
    kind_name = opts.get("kind")
    if kind_name is None:
        raise ConfigError("verify requires --kind")
    cfg = _experiment_config(_resolve_kind(kind_name, opts), opts)
    targets = _verify_targets(cfg)
    if targets is None:
        raise ConfigError(
            f"no closed-form target for {kind_name} with ensemble {cfg.ensemble.value} "
            f"and state mode {cfg.state_mode.value}")
    gate = opts.get("gate_sigma", 5.0)
    table = run_experiment(cfg, parallelism=opts.get("parallelism", 1))
    failures = 0
    for n, label, target in targets:
        row = table.row_for(n)
        z = z_score(row.mean, row.stderr, target)
        ok = abs(z) <= gate
        failures += 0 if ok else 1
        print(f"{'PASS' if ok else 'FAIL'} n={n:>3d} {label:<14s} mean={_fmt(row.mean)} "
              f"stderr={_fmt(row.stderr)} target={target} z={z:+.3f} gate={gate:g}")
    print(f"{len(targets) - failures}/{len(targets)} gates passed")
    return 0 if failures == 0 else 1


def _cmd_fit(opts: dict) -> int:
    if opts.get("ensemble", "cue") != "cue":
        raise ConfigError("the form-factor model is a cue-ensemble statement; use --ensemble cue")
    cfg = _experiment_config(ExperimentKind.EP_CURVE, opts)
    d = cfg.d_a * cfg.d_b
    if cfg.n_max < 2 * d:
        raise ConfigError(f"fit needs the plateau resolved: --nmax at least {2 * d}")
    table = run_experiment(cfg, parallelism=opts.get("parallelism", 1))
    ns = np.array([r.n for r in table.rows])
    means = np.array([r.mean for r in table.rows])
    stderrs = np.array([r.stderr for r in table.rows])
    fit = fit_form_factor_model(EntropySeries(ns, means), d)
    pooled = float(np.sqrt(np.mean(stderrs**2)))
    plateau = float(model_prediction(fit, np.array([2 * d]), d)[0])
    target = ep_inf(CaseTag.A_CUE_COMPLEX, cfg.d_a, cfg.d_b)
    plateau_dev = abs(plateau - float(target)) / pooled
    residual_ok = fit.residual_rms < 3.0 * pooled
    plateau_ok = plateau_dev < 3.0
    print(f"c1={_fmt(fit.c1)} c2={_fmt(fit.c2)} c3={_fmt(fit.c3)} c4={_fmt(fit.c4)}")
    print(f"{'PASS' if residual_ok else 'FAIL'} residual_rms={_fmt(fit.residual_rms)} "
          f"pooled_stderr={_fmt(pooled)} gate=3x")
    print(f"{'PASS' if plateau_ok else 'FAIL'} plateau={_fmt(plateau)} target={target} "
          f"deviation={plateau_dev:.3f} pooled stderr, gate=3")
    return 0 if residual_ok and plateau_ok else 1


def main(argv: list[str] | None = None) -> int:
    try:
        inv = parse_invocation(sys.argv[1:] if argv is None else argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        opts = _merged_options(inv)
        if inv.subcommand == "table":
            return _cmd_table(opts)
        if inv.subcommand == "verify":
            return _cmd_verify(opts)
        if inv.subcommand == "fit":
            return _cmd_fit(opts)
        return _cmd_experiment(inv, opts)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
