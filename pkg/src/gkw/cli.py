"""Command-line interface.

Subcommands: eigen, validate, oracle, asympt, export-matrix, kernel-row.
Every file artifact embeds the fully resolved run configuration and a
schema version; identical configurations produce byte-identical output.
Exit codes: 0 success, 2 validation failure, 3 precision/convergence
failure, 4 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from fractions import Fraction
from pathlib import Path

from .analysis import dump_rows_csv, rows_from_eigenvalues
from .errors import ConsistencyError, ConvergenceError, GKWError, PrecisionError
from .kernel import dump_row_csv, k_window
from .oracle import oracle_eigenvalues, stable_eigenvalues
from .spectral import SpectralOptions, eigenvalue
from .traces import (
    column_identity,
    decomposition_matrix,
    dump_decomposition_csv,
    omega_trace_identity,
    pair_identity,
    trace_power,
)

SCHEMA = "gkw/1"

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_PRECISION = 3
EXIT_USAGE = 4


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved, seedless run configuration (provenance header)."""

    command: str
    precision_bits: int = 128
    v_max: int = 32
    mass_target: str = "1e-20"
    j_cap: int | None = None
    dim: int = 40
    count: int = 6
    ell: int = 2
    n_max: int = 40
    power: int = 1
    output_format: str = "csv"
    out: str | None = None
    jobs: int = 1
    plots: bool = True

    def spectral_options(self) -> SpectralOptions:
        return SpectralOptions(
            precision=self.precision_bits,
            v_max=self.v_max,
            mass_tol=_fraction_from_sci(self.mass_target),
            j_cap=self.j_cap,
        )

    def header_lines(self) -> list[str]:
        pairs = ",".join(f"{k}={v}" for k, v in sorted(asdict(self).items()))
        return [f"# schema={SCHEMA}", f"# config {pairs}"]


def _fraction_from_sci(text: str) -> Fraction:
    """Parse decimal/scientific notation into an exact Fraction."""
    text = text.strip().lower()
    if "e" in text:
        mant, exp = text.split("e")
        e = int(exp)
        base = Fraction(mant)
        return base * Fraction(10) ** e
    return Fraction(text)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_n_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if lo < 1 or hi < lo:
            raise ValueError(f"bad index range {text!r}")
        return list(range(lo, hi + 1))
    n = int(text)
    if n < 1:
        raise ValueError("index starts at 1")
    return [n]


def _read_config_file(path: str) -> dict:
    out = {}
    for raw_line in Path(path).read_text().splitlines():
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {raw_line!r}")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _build_parser() -> _Parser:
    p = _Parser(prog="gkw", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--prec", type=int, default=None, help="precision in bits (default 128)")
        sp.add_argument("--vmax", type=int, default=None, help="layers to compute (default 32)")
        sp.add_argument("--mass-target", default=None, help="kernel/window mass tolerance (default 1e-20)")
        sp.add_argument("--jcap", type=int, default=None, help="hard cap on window indices")
        sp.add_argument("--format", choices=("csv", "json"), default=None)
        sp.add_argument("--out", default=None, help="output file or directory")
        sp.add_argument("--jobs", type=int, default=None, help="parallel workers for ranges")
        sp.add_argument("--config", default=None, help="key=value config file; flags override")
        sp.add_argument("--no-plot", action="store_true", help="skip figure rendering")

    sp = sub.add_parser("eigen", help="eigenvalues from the layer recurrence")
    sp.add_argument("--n", required=True, help="index or inclusive range a..b")
    sp.add_argument("--raw", action="store_true", help="report the raw partial sum (no refinement)")
    common(sp)

    sp = sub.add_parser("validate", help="identity checks with residual verdicts")
    sp.add_argument("identity", choices=("column", "pair", "omega", "kernel", "trace"))
    sp.add_argument("--ell", type=int, default=None)
    sp.add_argument("--nmax", type=int, default=None)
    sp.add_argument("--power", type=int, default=None)
    sp.add_argument("--lmax", type=int, default=None, help="kernel check: max row index")
    sp.add_argument("--threshold", default="1e-6")
    common(sp)

    sp = sub.add_parser("oracle", help="matrix-truncation spectrum")
    sp.add_argument("--dim", type=int, default=None)
    sp.add_argument("--count", type=int, default=None)
    sp.add_argument("--stability", action="store_true", help="also compare against dim+10")
    common(sp)

    sp = sub.add_parser("asympt", help="c(n) table and ratio trend")
    sp.add_argument("--nmax", type=int, default=None)
    common(sp)

    sp = sub.add_parser("export-matrix", help="trace-decomposition table")
    sp.add_argument("--lmax", type=int, default=5)
    sp.add_argument("--nmax", type=int, default=None)
    common(sp)

    sp = sub.add_parser("kernel-row", help="dump one kernel row window")
    sp.add_argument("--ell", type=int, required=True)
    common(sp)
    return p


def _resolve_config(args) -> RunConfig:
    file_vals = _read_config_file(args.config) if getattr(args, "config", None) else {}

    def pick(flag_value, file_key, default, cast):
        if flag_value is not None:
            return flag_value
        if file_key in file_vals:
            return cast(file_vals[file_key])
        return default

    default_nmax = {"asympt": 10, "export-matrix": 30}.get(args.command, 40)
    return RunConfig(
        command=args.command,
        precision_bits=pick(args.prec, "prec", 128, int),
        v_max=pick(args.vmax, "vmax", 32, int),
        mass_target=pick(args.mass_target, "mass_target", "1e-20", str),
        j_cap=pick(args.jcap, "jcap", None, int),
        dim=pick(getattr(args, "dim", None), "dim", 40, int),
        count=pick(getattr(args, "count", None), "count", 6, int),
        ell=pick(getattr(args, "ell", None), "ell", 2, int),
        n_max=pick(getattr(args, "nmax", None), "nmax", default_nmax, int),
        power=pick(getattr(args, "power", None), "power", 1, int),
        output_format=pick(getattr(args, "format", None), "format", "csv", str),
        out=pick(getattr(args, "out", None), "out", None, str),
        jobs=pick(getattr(args, "jobs", None), "jobs", 1, int),
        plots=not getattr(args, "no_plot", False),
    )


def _out_paths(cfg: RunConfig, stem: str):
    """Primary artifact path and figure path from --out (file or directory)."""
    if cfg.out is None:
        return None, None
    out = Path(cfg.out)
    ext = ".json" if cfg.output_format == "json" else ".csv"
    if out.suffix:
        base = out
    else:
        out.mkdir(parents=True, exist_ok=True)
        base = out / f"{stem}{ext}"
    return base, base.with_suffix(".png")


def _write_json(path, cfg: RunConfig, payload: dict) -> None:
    doc = {"schema": SCHEMA, "config": asdict(cfg)}
    doc.update(payload)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _write_csv(path, cfg: RunConfig, header: str, rows: list[str]) -> None:
    lines = cfg.header_lines() + [header] + rows
    path.write_text("\n".join(lines) + "\n")


def _eigen_worker(payload):
    n, cfg_dict, raw = payload
    cfg = RunConfig(**cfg_dict)
    opts = replace(cfg.spectral_options(), refine=not raw)
    res = eigenvalue(n, opts)
    return {
        "n": res.n,
        "lambda": res.lam.to_decimal(),
        "layers": [w.to_decimal() for w in res.layer_values],
        "window": list(res.window),
        "v_max": res.v_max,
        "precision_bits": res.precision,
        "tail_conservative": res.tail_conservative.to_decimal(8),
        "tail_heuristic": res.tail_heuristic.to_decimal(8),
        "refined": res.refined,
        "lambda_partial": res.partial_sum.to_decimal(),
        "window_error": res.window_error.to_decimal(8) if res.window_error is not None else None,
    }


def _cmd_eigen(args) -> int:
    cfg = _resolve_config(args)
    ns = _parse_n_range(args.n)
    payloads = [(n, asdict(cfg), args.raw) for n in ns]
    if cfg.jobs > 1 and len(ns) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            records = list(pool.map(_eigen_worker, payloads))
    else:
        records = [_eigen_worker(p) for p in payloads]
    records.sort(key=lambda r: r["n"])

    path, figpath = _out_paths(cfg, f"eigen_n{ns[0]}_{ns[-1]}")
    if path is None:
        for r in records:
            print(f"n={r['n']} lambda={r['lambda']} (refined={r['refined']})")
    elif cfg.output_format == "json":
        _write_json(path, cfg, {"records": records})
    else:
        rows = [
            f"{r['n']},{r['lambda']},{r['lambda_partial']},{r['tail_conservative']},"
            f"{r['tail_heuristic']},{r['window'][0]},{r['window'][1]},{r['v_max']},"
            f"{r['precision_bits']},{r['refined']}"
            for r in records
        ]
        _write_csv(
            path,
            cfg,
            "n,lambda,lambda_partial,tail_conservative,tail_heuristic,window_lo,window_hi,v_max,precision_bits,refined",
            rows,
        )
    if path is not None and cfg.plots:
        from . import plotting

        plotting.plot_eigen_records(
            [{"n": r["n"], "lambda": r["lambda"]} for r in records], figpath
        )
        if len(records) == 1:
            layer_fig = figpath.with_name(figpath.stem + "_layers.png")
            plotting.plot_layer_decay(
                records[0]["n"], [float(x) for x in records[0]["layers"]], layer_fig
            )
    return EXIT_OK


def _cmd_validate(args) -> int:
    cfg = _resolve_config(args)
    threshold = float(args.threshold)
    opts = cfg.spectral_options()
    checks: list[tuple[str, float, float]] = []  # (label, residual, threshold)

    if args.identity == "column":
        resid = column_identity(cfg.ell, cfg.n_max, opts)
        checks.append((f"column l={cfg.ell} nmax={cfg.n_max}", float(resid), threshold))
    elif args.identity == "pair":
        resid = pair_identity(cfg.ell, cfg.n_max, opts)
        checks.append((f"pair l={cfg.ell} nmax={cfg.n_max}", float(resid), threshold))
    elif args.identity == "omega":
        resid = omega_trace_identity(cfg.power, cfg.ell, cfg.n_max, opts)
        checks.append(
            (f"omega power={cfg.power} l={cfg.ell} nmax={cfg.n_max}", float(resid), threshold)
        )
    elif args.identity == "trace":
        report = trace_power(cfg.power, prec=cfg.precision_bits)
        if cfg.power == 1:
            gap = float(abs(report.value - report.alt_value))
            checks.append(("trace power=1 two-method gap", gap, float(report.combined_tolerance)))
        else:
            checks.append(("trace power=2 tail bound", float(report.tail_bound), 1.0))
    else:  # kernel
        from .kernel import k_coeff

        lmax = args.lmax or 30
        sym_fail = 0
        for ell in range(1, lmax + 1):
            for j in range(1, lmax + 1):
                if not (ell * k_coeff(j, ell) == j * k_coeff(ell, j)):
                    sym_fail += 1
        checks.append((f"kernel symmetry l,j<={lmax}", float(sym_fail), 0.5))
        worst = 0.0
        target = Fraction(1) - _fraction_from_sci(cfg.mass_target)
        for ell in range(1, min(lmax, 30) + 1):
            table = k_window(ell, target, prec=cfg.precision_bits)
            worst = max(worst, float(table.tail_mass_bound))
        checks.append(
            (f"kernel row-sum deficit l<={min(lmax, 30)}", worst, float(_fraction_from_sci(cfg.mass_target)))
        )

    rows = []
    failed = False
    for label, resid, thr in checks:
        ok = resid < thr
        failed = failed or not ok
        verdict = "pass" if ok else "FAIL"
        rows.append(f"{label},{resid:.6e},{thr:.3e},{verdict}")
        print(f"{label}: residual {resid:.6e} (threshold {thr:.3e}) -> {verdict}")

    path, figpath = _out_paths(cfg, f"validate_{args.identity}")
    if path is not None:
        if cfg.output_format == "json":
            _write_json(
                path,
                cfg,
                {
                    "checks": [
                        {"label": l, "residual": r, "threshold": t, "pass": r < t}
                        for l, r, t in checks
                    ]
                },
            )
        else:
            _write_csv(path, cfg, "label,residual,threshold,verdict", rows)
    return EXIT_VALIDATION if failed else EXIT_OK


def _cmd_oracle(args) -> int:
    cfg = _resolve_config(args)
    if args.stability:
        values, drift = stable_eigenvalues(cfg.dim, cfg.count, cfg.precision_bits)
        print(f"stability vs N+10: max drift {float(drift):.3e}")
    else:
        values = oracle_eigenvalues(cfg.dim, cfg.count, cfg.precision_bits)
    for i, lam in enumerate(values, start=1):
        print(f"lambda_{i} = {lam.to_decimal()}")
    path, figpath = _out_paths(cfg, f"oracle_N{cfg.dim}")
    if path is not None:
        if cfg.output_format == "json":
            _write_json(
                path,
                cfg,
                {"N": cfg.dim, "eigenvalues": [v.to_decimal() for v in values]},
            )
        else:
            _write_csv(
                path,
                cfg,
                "N,index,eigenvalue",
                [f"{cfg.dim},{i},{v.to_decimal()}" for i, v in enumerate(values, 1)],
            )
        if cfg.plots:
            from . import plotting

            plotting.plot_oracle_spectrum(cfg.dim, [float(v) for v in values], figpath)
    return EXIT_OK


def _cmd_asympt(args) -> int:
    cfg = _resolve_config(args)
    n_max = cfg.n_max
    opts = cfg.spectral_options()
    pairs = []
    errs = {}
    for n in range(1, n_max + 1):
        res = eigenvalue(n, opts)
        pairs.append((n, res.lam))
        errs[n] = res.window_error if res.window_error is not None else res.lam.ulp()
    rows = rows_from_eigenvalues(pairs, errs)
    for r in rows:
        ratio = f" ratio={float(r.ratio_to_next):+.6f}" if r.ratio_to_next else ""
        print(f"n={r.n} lambda={float(r.lam):+.12e} c(n)={float(r.c_n):.6f}{ratio}")
    path, figpath = _out_paths(cfg, f"asympt_n{n_max}")
    if path is not None:
        if cfg.output_format == "json":
            _write_json(
                path,
                cfg,
                {
                    "rows": [
                        {
                            "n": r.n,
                            "lambda": r.lam.to_decimal(),
                            "c_n": r.c_n.to_decimal(),
                            "ratio": r.ratio_to_next.to_decimal() if r.ratio_to_next else None,
                            "err_lambda": r.err_lambda.to_decimal(8),
                        }
                        for r in rows
                    ]
                },
            )
        else:
            dump_rows_csv(rows, path)
            text = path.read_text()
            path.write_text("\n".join(cfg.header_lines()) + "\n" + text)
        if cfg.plots:
            from . import plotting

            plotting.plot_asympt([{"n": r.n, "c_n": float(r.c_n)} for r in rows], figpath)
    return EXIT_OK


def _cmd_export_matrix(args) -> int:
    cfg = _resolve_config(args)
    n_max = cfg.n_max
    matrix = decomposition_matrix(n_max, args.lmax, cfg.spectral_options())
    path, figpath = _out_paths(cfg, f"decomposition_l{args.lmax}_n{n_max}")
    if path is None:
        print("column sums vs closed forms:")
        for ell in range(1, args.lmax + 1):
            print(
                f"  l={ell}: {float(matrix['col_sums'][ell]):+.10f}"
                f" target {float(matrix['col_targets'][ell]):+.10f}"
            )
        return EXIT_OK
    if cfg.output_format == "json":
        _write_json(
            path,
            cfg,
            {
                "n_max": n_max,
                "l_max": args.lmax,
                "cells": {
                    f"{n},{ell}": matrix["cells"][(n, ell)].to_decimal()
                    for n in range(1, n_max + 1)
                    for ell in range(1, args.lmax + 1)
                },
                "col_targets": {
                    str(ell): matrix["col_targets"][ell].to_decimal()
                    for ell in range(1, args.lmax + 1)
                },
            },
        )
    else:
        dump_decomposition_csv(matrix, path)
        text = path.read_text()
        path.write_text("\n".join(cfg.header_lines()) + "\n" + text)
    if cfg.plots:
        from . import plotting

        plotting.plot_decomposition(matrix, figpath)
    return EXIT_OK


def _cmd_kernel_row(args) -> int:
    cfg = _resolve_config(args)
    table = k_window(
        cfg.ell,
        Fraction(1) - _fraction_from_sci(cfg.mass_target),
        j_cap=cfg.j_cap,
        prec=cfg.precision_bits,
    )
    print(
        f"row l={cfg.ell}: window [{table.j_lo}, {table.j_hi}], "
        f"tail mass <= {float(table.tail_mass_bound):.3e}"
    )
    path, figpath = _out_paths(cfg, f"kernel_row_l{cfg.ell}")
    if path is not None:
        dump_row_csv(table, path, prec=cfg.precision_bits)
        text = path.read_text()
        path.write_text("\n".join(cfg.header_lines()) + "\n" + text)
        if cfg.plots:
            from . import plotting
            from .numerics import quad_to_float

            js = list(range(table.j_lo, table.j_hi + 1))
            vals = [float(quad_to_float(table.values[j], 64)) for j in js]
            plotting.plot_kernel_row(cfg.ell, js, vals, figpath)
    return EXIT_OK


_DISPATCH = {
    "eigen": _cmd_eigen,
    "validate": _cmd_validate,
    "oracle": _cmd_oracle,
    "asympt": _cmd_asympt,
    "export-matrix": _cmd_export_matrix,
    "kernel-row": _cmd_kernel_row,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"gkw: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PrecisionError, ConvergenceError) as exc:
        print(f"gkw: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except ConsistencyError as exc:
        print(f"gkw: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except GKWError as exc:
        print(f"gkw: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
