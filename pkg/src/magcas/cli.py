"""Command-line frontend: single-point computation, figure reproduction,
custom sweeps, magnetization scans and preset inspection.

Exit codes: 0 success, 2 argument error, 3 preset/config error,
4 numerical failure (tolerance not met, unstable dispersion).

Output files are locale-independent (decimal points, LF endings, fixed
column order); CSV and JSON emitted from the same run carry identical
numeric values because both use shortest round-trip float formatting.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import __version__
from .casimir import CasimirQuad, casimir_energy, casimir_magnetization
from .dispersion import AfmParams, FerriParams
from .errors import (
    ComplexFrequency,
    InvariantViolation,
    MagcasError,
    NonPositiveSquareBracket,
    NotApplicable,
    ParseError,
    ToleranceNotMet,
    UnknownField,
    UnknownFigure,
    UnknownPreset,
)
from .materials import (
    dumps_preset,
    load_params,
    override_params,
    preset,
    preset_names,
)
from .sweep import SweepPlan, figure_bundle, run_sweep

SCHEMA_VERSION = "1"
CSV_COLUMNS = ("Nz", "E_sum(meV)", "E_int(meV)", "E_cas(meV)", "C_b(meV)",
               "b", "err(meV)", "flags")

_CONFIG_ERRORS = (UnknownPreset, ParseError, UnknownField, InvariantViolation,
                  FileNotFoundError)
_NUMERICAL_ERRORS = (ToleranceNotMet, ComplexFrequency, NonPositiveSquareBracket,
                     NotApplicable)


def _fmt(x) -> str:
    return repr(float(x))


def _params_snapshot(p) -> dict:
    return {k: v for k, v in dataclasses.asdict(p.params).items() if v is not None}


def _resolve_preset(args):
    if getattr(args, "config", None):
        base = load_params(args.config)
    else:
        base = preset(args.preset)
    overrides = {}
    if getattr(args, "l", None) is not None:
        overrides["l"] = args.l
    if getattr(args, "dz_ratio", None) is not None:
        overrides["dz_ratio"] = args.dz_ratio
    if getattr(args, "delta", None) is not None:
        overrides["delta"] = args.delta
    if getattr(args, "h0_mev", None) is not None:
        overrides["h0"] = args.h0_mev
    return override_params(base, **overrides) if overrides else base


def _quad_for(args, params, swept_l=None) -> CasimirQuad:
    if getattr(args, "fast", False):
        studied_l = tuple(swept_l) if swept_l is not None else (
            (params.l_exponent,) if isinstance(params, FerriParams) else ())
        if any(l == 2.0 for l in studied_l):
            raise _ArgumentError(
                "--fast is refused for l = 2 studies: the residual signal "
                "sits below the relaxed tolerances"
            )
        return CasimirQuad.fast()
    return CasimirQuad.default()


class _ArgumentError(Exception):
    pass


def _row_dict(axis, axis_value, n_z, result, error=None, flags=()):
    if result is not None:
        flags = tuple(flags) + tuple(result.flags)
        return {
            "axis": axis, "axis_value": axis_value, "Nz": n_z,
            "E_sum_meV": result.E_sum, "E_int_meV": result.E_int,
            "E_cas_meV": result.E_cas, "C_b_meV": result.coefficient,
            "b": result.b_exponent, "err_meV": result.error_estimate,
            "flags": ";".join(sorted(set(flags))), "error": "",
        }
    return {
        "axis": axis, "axis_value": axis_value, "Nz": n_z,
        "E_sum_meV": None, "E_int_meV": None, "E_cas_meV": None,
        "C_b_meV": None, "b": None, "err_meV": None,
        "flags": ";".join(sorted(set(flags))), "error": error or "",
    }


def _csv_cell(value):
    if value is None:
        return "nan"
    if isinstance(value, float):
        return _fmt(value)
    return str(value)


def _rows_to_csv_lines(rows, axis="N_z"):
    extra = () if axis == "N_z" else (_axis_column(axis),)
    lines = [",".join(extra + CSV_COLUMNS)]
    for r in rows:
        cells = []
        if extra:
            cells.append(_csv_cell(r["axis_value"]))
        cells += [
            str(r["Nz"]), _csv_cell(r["E_sum_meV"]), _csv_cell(r["E_int_meV"]),
            _csv_cell(r["E_cas_meV"]), _csv_cell(r["C_b_meV"]),
            _csv_cell(r["b"]), _csv_cell(r["err_meV"]),
            r["flags"] if not r["error"] else (r["flags"] + ";FAILED").lstrip(";"),
        ]
        lines.append(",".join(cells))
    return lines


def _axis_column(axis):
    return {"l": "l()", "D_z_ratio": "Dz_ratio()", "delta": "delta()",
            "H0": "H0(meV)"}[axis]


def _record(args, chosen, rows, axis="N_z"):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": " ".join(args._argv),
        "units": {"energy": "meV", "normalization": "per surface magnetic unit cell"},
        "preset": {"name": chosen.name, "kind": chosen.kind,
                   "params": _params_snapshot(chosen)},
        "axis": axis,
        "rows": rows,
    }


def _emit(record, rows, args, axis="N_z"):
    fmt = getattr(args, "format", None)
    out = getattr(args, "out", None)
    if fmt is None:
        fmt = "json" if (out and str(out).endswith(".json")) else "csv"
    if fmt == "json":
        text = json.dumps(record, indent=2) + "\n"
    else:
        text = "\n".join(_rows_to_csv_lines(rows, axis)) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def cmd_compute(args) -> int:
    chosen = _resolve_preset(args)
    quad = _quad_for(args, chosen.params)
    result = casimir_energy(chosen.params, args.nz, quad, b_exponent=args.b)
    rows = [_row_dict("N_z", args.nz, args.nz, result)]
    _emit(_record(args, chosen, rows), rows, args)
    return 0


def cmd_sweep(args) -> int:
    chosen = _resolve_preset(args)
    quad = _quad_for(args, chosen.params,
                     swept_l=args.values if args.axis == "l" else None)
    if args.axis == "N_z":
        values = tuple(int(v) for v in args.values)
        fixed_nz = None
    else:
        values = tuple(args.values)
        fixed_nz = args.nz
        if fixed_nz is None:
            raise _ArgumentError(f"--nz is required for axis {args.axis}")
    exponents = tuple(args.b) if args.b else (None,)
    if exponents == (None,):
        exponents = (3.0,) if isinstance(chosen.params, AfmParams) \
            else (chosen.params.l_exponent,)
    plan = SweepPlan(chosen, args.axis, values, exponents, quad=quad, N_z=fixed_nz)
    sweep_rows = run_sweep(plan, workers=args.workers)
    rows = []
    for sr in sweep_rows:
        n_z = sr.axis_value if args.axis == "N_z" else fixed_nz
        if sr.error:
            rows.append(_row_dict(args.axis, sr.axis_value, n_z, None,
                                  error=sr.error, flags=sr.flags))
        else:
            for res in sr.results:
                rows.append(_row_dict(args.axis, sr.axis_value, n_z, res,
                                      flags=sr.flags))
    _emit(_record(args, chosen, rows, args.axis), rows, args, args.axis)
    return 0


_GP_TEMPLATE = """\
# gnuplot script: run `gnuplot {stem}.gp` in this directory
set datafile separator ","
set key top right
set xlabel "N_z"
set ylabel "E_cas (meV)"
set multiplot
plot {main_plots}
# inset: rescaled coefficient C^[b] = E_cas * N_z^b
set origin 0.42, 0.38
set size 0.52, 0.52
set xlabel "N_z" offset 0,0.5
set ylabel "C_b (meV)"
unset key
plot {inset_plots}
unset multiplot
"""


def cmd_figure(args) -> int:
    bundle = figure_bundle(args.figure_id)
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    nz_values = tuple(range(args.nz_min, args.nz_max + 1))
    stem = args.figure_id.lower()
    curve_files = []
    label = None
    try:
        for label, plan in bundle:
            quad = _quad_for(args, plan.preset.params)
            plan = dataclasses.replace(plan, values=nz_values, quad=quad)
            sweep_rows = run_sweep(plan, workers=args.workers)
            rows = []
            for sr in sweep_rows:
                if sr.error:
                    rows.append(_row_dict("N_z", sr.axis_value, sr.axis_value,
                                          None, error=sr.error, flags=sr.flags))
                else:
                    for res in sr.results:
                        rows.append(_row_dict("N_z", sr.axis_value, sr.axis_value,
                                              res, flags=sr.flags))
            path = outdir / f"{stem}_{label}.csv"
            path.write_text("\n".join(_rows_to_csv_lines(rows)) + "\n",
                            encoding="utf-8", newline="\n")
            curve_files.append((label, path.name))
    except KeyboardInterrupt:
        # mark the in-progress curve so partial outputs are recognizable
        if label is not None:
            partial = outdir / f"{stem}_{label}.csv"
            with open(partial, "a", encoding="utf-8", newline="\n") as fh:
                fh.write("# TRUNCATED\n")
        print("interrupted; partial output marked as truncated", file=sys.stderr)
        return 130

    main_plots = ", \\\n     ".join(
        f'"{fname}" using 1:4 with linespoints title "{label}"'
        for label, fname in curve_files)
    inset_plots = ", \\\n     ".join(
        f'"{fname}" using 1:5 with linespoints'
        for _, fname in curve_files)
    (outdir / f"{stem}.gp").write_text(
        _GP_TEMPLATE.format(stem=stem, main_plots=main_plots,
                            inset_plots=inset_plots),
        encoding="utf-8", newline="\n")
    print(f"wrote {len(curve_files)} curve file(s) and {stem}.gp to {outdir}")
    return 0


def cmd_magnetization(args) -> int:
    chosen = _resolve_preset(args)
    if not isinstance(chosen.params, FerriParams):
        raise _ArgumentError(
            "magnetization requires a ferrimagnet preset (H0 and omega_M semantics)"
        )
    quad = _quad_for(args, chosen.params)
    lines = ["Nz,dM_cas(),dM_bulk(),h_step(meV),err()"]
    json_rows = []
    for n_z in args.nz:
        res = casimir_magnetization(chosen.params, n_z, quad, h_step=args.h_step)
        lines.append(",".join([
            str(n_z), _fmt(res.casimir_term), _fmt(res.bulk_term),
            _fmt(res.h_step), _fmt(res.error_estimate)]))
        json_rows.append({
            "Nz": n_z, "dM_cas": res.casimir_term, "dM_bulk": res.bulk_term,
            "h_step_meV": res.h_step, "err": res.error_estimate})
    fmt = args.format or ("json" if (args.out and str(args.out).endswith(".json"))
                          else "csv")
    if fmt == "json":
        record = {
            "schema_version": SCHEMA_VERSION,
            "command": " ".join(args._argv),
            "units": {"derivative": "dimensionless (meV per meV of field energy)",
                      "normalization": "per surface magnetic unit cell"},
            "preset": {"name": chosen.name, "kind": chosen.kind,
                       "params": _params_snapshot(chosen)},
            "rows": json_rows,
        }
        text = json.dumps(record, indent=2) + "\n"
    else:
        text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    return 0


def cmd_presets(args) -> int:
    if args.name:
        p = preset(args.name)
        sys.stdout.write(dumps_preset(p))
    else:
        for name in preset_names():
            p = preset(name)
            print(f"{name:8s} {p.kind:12s} {p.provenance}")
    return 0


def _float_list(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _int_list(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _add_preset_args(sub, require=True):
    group = sub.add_mutually_exclusive_group(required=require)
    group.add_argument("--preset", help="built-in or registered preset name")
    group.add_argument("--config", help="path to a material config file")


def _add_override_args(sub):
    sub.add_argument("--l", type=float, help="thickness exponent override (ferrimagnet)")
    sub.add_argument("--dz-ratio", type=float, dest="dz_ratio",
                     help="D_z as a fraction of D (ferrimagnet)")
    sub.add_argument("--delta", type=float, help="gap parameter override (AFM)")
    sub.add_argument("--h0-mev", type=float, dest="h0_mev",
                     help="Zeeman energy override in meV (ferrimagnet)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magcas",
        description="Magnonic Casimir energies of magnetic thin films "
                    "(meV per surface magnetic unit cell).",
    )
    parser.add_argument("--version", action="version", version=f"magcas {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("compute", help="one Casimir energy evaluation")
    _add_preset_args(sub)
    sub.add_argument("--nz", type=int, required=True, help="film thickness in magnetic unit cells")
    _add_override_args(sub)
    sub.add_argument("--b", type=float, help="coefficient exponent (default: 3 for AFM, l for ferrimagnets)")
    sub.add_argument("--fast", action="store_true", help="relaxed tolerances (refused for l = 2)")
    sub.add_argument("--out", help="output path (default: stdout)")
    sub.add_argument("--format", choices=("csv", "json"))
    sub.set_defaults(func=cmd_compute)

    sub = subs.add_parser("sweep", help="custom parameter scan")
    _add_preset_args(sub)
    sub.add_argument("--axis", required=True,
                     choices=("N_z", "l", "D_z_ratio", "delta", "H0"))
    sub.add_argument("--values", required=True, type=_float_list,
                     help="comma-separated axis values")
    sub.add_argument("--nz", type=int, help="fixed thickness for non-N_z axes")
    _add_override_args(sub)
    sub.add_argument("--b", type=_float_list, help="comma-separated coefficient exponents")
    sub.add_argument("--fast", action="store_true")
    sub.add_argument("--workers", type=int, help="row parallelism (or MAGCAS_WORKERS)")
    sub.add_argument("--out", help="output path (default: stdout)")
    sub.add_argument("--format", choices=("csv", "json"))
    sub.set_defaults(func=cmd_sweep)

    sub = subs.add_parser("figure", help="reproduce a figure bundle as CSV + gnuplot")
    sub.add_argument("figure_id", help="Fig2, Fig3, FigS1 or FigS2")
    sub.add_argument("--out-dir", default="figures", dest="out_dir")
    sub.add_argument("--nz-min", type=int, default=1, dest="nz_min")
    sub.add_argument("--nz-max", type=int, default=30, dest="nz_max")
    sub.add_argument("--fast", action="store_true")
    sub.add_argument("--workers", type=int)
    sub.set_defaults(func=cmd_figure)

    sub = subs.add_parser("magnetization",
                          help="field derivative of the zero-point energies")
    _add_preset_args(sub)
    sub.add_argument("--nz", type=_int_list, required=True,
                     help="comma-separated thickness list")
    _add_override_args(sub)
    sub.add_argument("--h-step", type=float, default=1e-4, dest="h_step",
                     help="central-difference step in meV")
    sub.add_argument("--fast", action="store_true")
    sub.add_argument("--out")
    sub.add_argument("--format", choices=("csv", "json"))
    sub.set_defaults(func=cmd_magnetization)

    sub = subs.add_parser("presets", help="list or show material presets")
    sub.add_argument("name", nargs="?")
    sub.set_defaults(func=cmd_presets)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad arguments
        return int(exc.code or 0)
    args._argv = ["magcas"] + argv
    try:
        return args.func(args)
    except _ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except UnknownFigure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _CONFIG_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except _NUMERICAL_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4
    except MagcasError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
