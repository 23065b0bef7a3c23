"""Command-line front end.

Every number crosses the process boundary as a decimal string rendered
at the requested precision, grids and radii are parsed as exact
fractions, and all collections have fixed ordering, so identical flags
produce byte-identical output.  Exit codes: 0 success, 1 numeric
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

import mpmath as mp

from .errors import ParameterError, PtspecError
from .nodes import find_nodes
from .observables import (
    build_contour,
    expectation,
    identity_checks,
    wavefunction_samples,
)
from .precision import PrecisionContext, as_fraction, real_str
from .quantize import (
    connection_coefficient,
    health_check,
    quantize_p_symmetric,
    scan_im_c,
    spectrum,
)
from .series import TruncationParams, build_tables, eval_psi, wronskian
from .wedges import angle_radians, pt_pairs

ENV_DIGITS = "PTSPEC_DIGITS"


@dataclass(frozen=True)
class RunConfig:
    """Validated common parameters of one CLI invocation."""

    n_exponent: int
    pmax: int
    radius: Fraction
    digits: int
    pair_index: int
    lam: Fraction
    output: Optional[str]
    fmt: str


def _default_digits() -> int:
    raw = os.environ.get(ENV_DIGITS)
    if raw is None:
        return 40
    try:
        return int(raw)
    except ValueError:
        raise ParameterError(f"{ENV_DIGITS} must be an integer, got {raw!r}")


_CSV_BY_DEFAULT = ("scan", "wavefunction")  # plot data


def _config(args) -> RunConfig:
    if args.N < 2:
        raise ParameterError(f"N must be an integer >= 2, got {args.N}")
    if args.pair < 0:
        raise ParameterError(f"pair index must be >= 0, got {args.pair}")
    fmt = args.format
    if fmt is None:
        fmt = "csv" if args.command in _CSV_BY_DEFAULT else "json"
    cfg = RunConfig(
        n_exponent=args.N,
        pmax=args.pmax,
        radius=as_fraction(args.radius),
        digits=args.digits,
        pair_index=args.pair,
        lam=as_fraction(args.lam),
        output=args.output,
        fmt=fmt,
    )
    if cfg.lam <= 0:
        raise ParameterError(f"lambda must be positive, got {args.lam}")
    return cfg


def _ctx(cfg: RunConfig) -> PrecisionContext:
    return PrecisionContext(cfg.digits)


def _trunc(cfg: RunConfig) -> TruncationParams:
    return TruncationParams(cfg.pmax, cfg.radius)


def _pair(cfg: RunConfig):
    pairs = pt_pairs(cfg.n_exponent)
    if cfg.pair_index >= len(pairs):
        raise ParameterError(
            f"N={cfg.n_exponent} has {len(pairs)} wedge pairs; pair index "
            f"{cfg.pair_index} is out of range"
        )
    return pairs[cfg.pair_index]


def _num(x, digits: int) -> str:
    # no mp.mpf(x) here: conversion outside a workdps block would re-round
    if mp.isnan(x):
        return "nan"
    if mp.isinf(x):
        return "inf" if x > 0 else "-inf"
    return real_str(x, digits)


def _params_dict(cfg: RunConfig) -> dict:
    return {
        "N": cfg.n_exponent,
        "pmax": cfg.pmax,
        "radius": str(cfg.radius),
        "digits": cfg.digits,
        "pair": cfg.pair_index,
    }


def _params_comment(cfg: RunConfig, command: str) -> str:
    return (
        f"# ptspec {command} N={cfg.n_exponent} pmax={cfg.pmax} "
        f"radius={cfg.radius} digits={cfg.digits} pair={cfg.pair_index}"
    )


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj, cfg: RunConfig) -> None:
    _emit(json.dumps(obj, indent=2) + "\n", cfg)


def _level_json(level, cfg: RunConfig) -> dict:
    return {
        "n": level.n,
        "E": _num(level.E, cfg.digits),
        "c": None if level.c is None else _num(level.c, cfg.digits),
        "parity": level.parity,
        "est_error": _num(level.diagnostics.est_error, 3),
        "stable": level.diagnostics.stable,
        "params": _params_dict(cfg),
    }


def _health_json(report) -> dict:
    return {
        "passed": report.passed,
        "e_max": str(report.e_max),
        "entries": [
            {
                "pair": e.pair_index,
                "theta_right_pi": str(e.theta_right),
                "theta_left_pi": str(e.theta_left),
                "tail": _num(max(e.tail_right, e.tail_left), 3),
                "c_discrepancy": _num(e.c_discrepancy, 3),
                "passed": e.passed,
            }
            for e in report.entries
        ],
    }


def _parity_levels(table, parity, n_levels, trunc, ctx, step, e_max):
    """Parity spectrum, interleaving both parities by |E| when asked
    for 'both' (parity spectra alternate even/odd as |E| grows)."""
    if parity in ("even", "odd"):
        return quantize_p_symmetric(table, parity, n_levels, trunc, ctx, step, e_max)
    even_n = (n_levels + 1) // 2
    odd_n = n_levels // 2
    levels = list(quantize_p_symmetric(table, "even", even_n, trunc, ctx, step, e_max))
    if odd_n:
        levels += list(quantize_p_symmetric(table, "odd", odd_n, trunc, ctx, step, e_max))
    levels.sort(key=lambda lv: abs(lv.E))
    return tuple(replace(lv, n=i) for i, lv in enumerate(levels))


def _levels_for(cfg, args, table, pair, n_levels, trunc, ctx):
    parity = getattr(args, "parity", "both")
    if pair.parity_swapped():
        if not pair.p_symmetric:
            flagged = [p.index for p in pt_pairs(cfg.n_exponent) if p.p_symmetric]
            hint = f"; use --pair {flagged[0]}" if flagged else ""
            raise ParameterError(
                f"pair {pair.index} is parity-degenerate but not the p-symmetric "
                f"pair; no quantization method applies to it{hint}"
            )
        return _parity_levels(table, parity, n_levels, trunc, ctx, args.step, args.emax)
    return spectrum(table, pair, n_levels, trunc, ctx, e_max=args.emax, step=args.step)


def _resolve_level(cfg, args, table, pair, index, trunc, ctx):
    if index < 0:
        raise ParameterError(f"level index must be >= 0, got {index}")
    # level lookup always scans at the default energy grid; --step on
    # sampling commands refers to their own output grid
    scan_args = argparse.Namespace(
        parity=getattr(args, "parity", "both"), step="0.05", emax="100"
    )
    return _levels_for(cfg, scan_args, table, pair, index + 1, trunc, ctx)[index]


# ---------------------------------------------------------------------------
# subcommands


def _cmd_wedges(cfg: RunConfig, args) -> int:
    pairs = pt_pairs(cfg.n_exponent)
    ctx = _ctx(cfg)
    rows = []
    for p in pairs:
        rows.append(
            {
                "index": p.index,
                "theta_right_pi": str(p.theta_right),
                "theta_right_rad": _num(angle_radians(p.theta_right, ctx), cfg.digits),
                "theta_left_pi": str(p.theta_left),
                "theta_left_rad": _num(angle_radians(p.theta_left, ctx), cfg.digits),
                "half_width_pi": str(p.half_width),
                "p_symmetric": p.p_symmetric,
            }
        )
    if cfg.fmt == "json":
        _emit_json({"N": cfg.n_exponent, "pairs": rows}, cfg)
    else:
        lines = [
            _params_comment(cfg, "wedges"),
            "index,theta_right_pi,theta_right_rad,theta_left_pi,theta_left_rad,"
            "half_width_pi,p_symmetric",
        ]
        for r in rows:
            lines.append(
                f"{r['index']},{r['theta_right_pi']},{r['theta_right_rad']},"
                f"{r['theta_left_pi']},{r['theta_left_rad']},{r['half_width_pi']},"
                f"{str(r['p_symmetric']).lower()}"
            )
        _emit("\n".join(lines) + "\n", cfg)
    return 0


def _cmd_scan(cfg: RunConfig, args) -> int:
    table = build_tables(cfg.n_exponent, cfg.pmax)
    pair = _pair(cfg)
    ctx, trunc = _ctx(cfg), _trunc(cfg)
    points = scan_im_c(table, pair, args.emin, args.emax, args.step, trunc, ctx)
    if cfg.fmt == "json":
        _emit_json(
            {
                "params": _params_dict(cfg),
                "points": [
                    {
                        "E": _num(p.E, cfg.digits),
                        "re_c": _num(p.c_re, cfg.digits),
                        "im_c": _num(p.c_im, cfg.digits),
                        "flag": p.flag,
                    }
                    for p in points
                ],
            },
            cfg,
        )
    else:
        lines = [_params_comment(cfg, "scan"), "E,re_c,im_c,flag"]
        for p in points:
            lines.append(
                f"{_num(p.E, cfg.digits)},{_num(p.c_re, cfg.digits)},"
                f"{_num(p.c_im, cfg.digits)},{p.flag}"
            )
        _emit("\n".join(lines) + "\n", cfg)
    return 0


def _cmd_spectrum(cfg: RunConfig, args) -> int:
    table = build_tables(cfg.n_exponent, cfg.pmax)
    pair = _pair(cfg)
    ctx, trunc = _ctx(cfg), _trunc(cfg)
    health = health_check(table, trunc, args.health_emax, ctx)
    if not health.passed and not args.force:
        _emit_json(
            {
                "error": "truncation health check failed; rerun with --force to override",
                "params": _params_dict(cfg),
                "health": _health_json(health),
            },
            cfg,
        )
        print(
            "ptspec: health check failed for "
            f"pmax={cfg.pmax} radius={cfg.radius} (see report); use --force to override",
            file=sys.stderr,
        )
        return 1
    levels = _levels_for(cfg, args, table, pair, args.levels, trunc, ctx)
    if cfg.fmt == "json":
        _emit_json(
            {
                "params": _params_dict(cfg),
                "health": _health_json(health),
                "levels": [_level_json(lv, cfg) for lv in levels],
            },
            cfg,
        )
    else:
        lines = [_params_comment(cfg, "spectrum"), "n,E,c,parity,est_error,stable"]
        for lv in levels:
            c_txt = "" if lv.c is None else _num(lv.c, cfg.digits)
            lines.append(
                f"{lv.n},{_num(lv.E, cfg.digits)},{c_txt},{lv.parity or ''},"
                f"{_num(lv.diagnostics.est_error, 3)},{str(lv.diagnostics.stable).lower()}"
            )
        _emit("\n".join(lines) + "\n", cfg)
    return 0


def _parse_region(raw: Optional[str]):
    if raw is None:
        return None
    parts = raw.split(",")
    if len(parts) != 4:
        raise ParameterError(
            f"region must be 're_min,re_max,im_min,im_max', got {raw!r}"
        )
    return tuple(as_fraction(p.strip()) for p in parts)


def _cmd_nodes(cfg: RunConfig, args) -> int:
    table = build_tables(cfg.n_exponent, cfg.pmax)
    pair = _pair(cfg)
    ctx, trunc = _ctx(cfg), _trunc(cfg)
    level = _resolve_level(cfg, args, table, pair, args.level, trunc, ctx)
    nodeset = find_nodes(
        table, level, _parse_region(args.region), args.grid_step, None, trunc, ctx
    )

    def zrows(zs):
        return [
            {"re": _num(z.real, cfg.digits), "im": _num(z.imag, cfg.digits)} for z in zs
        ]

    if cfg.fmt == "json":
        _emit_json(
            {
                "params": _params_dict(cfg),
                "level": _level_json(level, cfg),
                "axis_nodes": zrows(nodeset.axis_nodes),
                "arch_nodes": zrows(nodeset.arch_nodes),
                "turning_points": zrows(nodeset.turning_points),
                "failed_seeds": zrows(nodeset.failed_seeds),
            },
            cfg,
        )
    else:
        lines = [_params_comment(cfg, "nodes"), "kind,re,im"]
        for kind, zs in (
            ("axis", nodeset.axis_nodes),
            ("arch", nodeset.arch_nodes),
            ("turning", nodeset.turning_points),
        ):
            for z in zs:
                lines.append(f"{kind},{_num(z.real, cfg.digits)},{_num(z.imag, cfg.digits)}")
        _emit("\n".join(lines) + "\n", cfg)
    return 0


def _parse_moments(raw: str):
    try:
        moments = tuple(int(p) for p in raw.split(","))
    except ValueError:
        raise ParameterError(f"moments must be a comma list of integers, got {raw!r}")
    if not moments or any(m < 0 for m in moments):
        raise ParameterError(f"moment orders must be >= 0, got {raw!r}")
    return moments


def _cmd_expect(cfg: RunConfig, args) -> int:
    table = build_tables(cfg.n_exponent, cfg.pmax)
    pair = _pair(cfg)
    ctx, trunc = _ctx(cfg), _trunc(cfg)
    level = _resolve_level(cfg, args, table, pair, args.level, trunc, ctx)
    contour = build_contour(pair, cfg.lam, args.contour)
    moments = _parse_moments(args.moments)
    results = [expectation(table, level, m, contour, trunc, ctx) for m in moments]
    identities = identity_checks(table, [level], trunc, ctx, contour=contour).rows[0]
    if cfg.fmt == "json":
        _emit_json(
            {
                "params": _params_dict(cfg),
                "contour": {"style": contour.style, "lambda": str(contour.lam)},
                "level": _level_json(level, cfg),
                "moments": [
                    {
                        "m": r.m,
                        "re_value": _num(r.value.real, cfg.digits),
                        "im_value": _num(r.value.imag, cfg.digits),
                        "est_error": _num(r.est_error, 3),
                    }
                    for r in results
                ],
                "identities": {
                    "ehrenfest_abs": _num(identities.ehrenfest_abs, 3),
                    "ehrenfest_ok": identities.ehrenfest_ok,
                    "virial_abs": None
                    if identities.virial_abs is None
                    else _num(identities.virial_abs, 3),
                    "virial_ok": identities.virial_ok,
                },
            },
            cfg,
        )
    else:
        lines = [_params_comment(cfg, "expect"), "n,m,re_value,im_value,est_error"]
        for r in results:
            lines.append(
                f"{r.n},{r.m},{_num(r.value.real, cfg.digits)},"
                f"{_num(r.value.imag, cfg.digits)},{_num(r.est_error, 3)}"
            )
        _emit("\n".join(lines) + "\n", cfg)
    return 0


def _cmd_wavefunction(cfg: RunConfig, args) -> int:
    table = build_tables(cfg.n_exponent, cfg.pmax)
    pair = _pair(cfg)
    ctx, trunc = _ctx(cfg), _trunc(cfg)
    level = _resolve_level(cfg, args, table, pair, args.level, trunc, ctx)
    samples = wavefunction_samples(
        table, level, args.xmin, args.xmax, args.step, trunc, ctx
    )
    if cfg.fmt == "json":
        _emit_json(
            {
                "params": _params_dict(cfg),
                "level": _level_json(level, cfg),
                "samples": [
                    {
                        "x": _num(x, cfg.digits),
                        "re_psi": _num(v.real, cfg.digits),
                        "im_psi": _num(v.imag, cfg.digits),
                    }
                    for x, v in samples
                ],
            },
            cfg,
        )
    else:
        lines = [_params_comment(cfg, "wavefunction"), "x,re_psi,im_psi"]
        for x, v in samples:
            lines.append(
                f"{_num(x, cfg.digits)},{_num(v.real, cfg.digits)},{_num(v.imag, cfg.digits)}"
            )
        _emit("\n".join(lines) + "\n", cfg)
    return 0


def _cmd_selfcheck(args) -> int:
    """Fast internal consistency run: Wronskian, PT reflection, N=2 oracle."""
    digits = getattr(args, "digits", None) or _default_digits()
    ctx = PrecisionContext(digits)
    trunc = TruncationParams(60, Fraction(8))
    checks = []

    table3 = build_tables(3, 60)
    with ctx.workdps():
        tol = mp.mpf(10) ** (-(digits - 10))
        worst_w = mp.mpf(0)
        for z, e in (
            (mp.mpc("0.7", "0.3"), "0"),
            (mp.mpc("-1.1", "0.8"), "7.3"),
            (mp.mpc("2.0", "-1.0"), "15.5"),
        ):
            worst_w = max(worst_w, abs(wronskian(table3, z, mp.mpf(e), ctx) - mp.mpc(0, 1)))
        checks.append(("wronskian", worst_w < tol, f"max |W - i| = {_num(worst_w, 3)}"))

        worst_pt = mp.mpf(0)
        pair3 = pt_pairs(3)[0]
        for z, e in ((mp.mpc("0.9", "0.4"), "5.5"), (mp.mpc("-1.3", "2.1"), "11.0")):
            p1, _, p2, _ = eval_psi(table3, z, mp.mpf(e), ctx)
            q1, _, q2, _ = eval_psi(table3, -mp.conj(z), mp.mpf(e), ctx)
            worst_pt = max(worst_pt, abs(q1 - mp.conj(p1)), abs(q2 - mp.conj(p2)))
        c_r = connection_coefficient(table3, pair3, mp.mpf("5.5"), trunc, ctx, "right")
        c_l = connection_coefficient(table3, pair3, mp.mpf("5.5"), trunc, ctx, "left")
        worst_pt = max(worst_pt, abs(c_l - mp.conj(c_r)))
        checks.append(("pt_reflection", worst_pt < tol, f"max deviation = {_num(worst_pt, 3)}"))

        table2 = build_tables(2, 60)
        worst_o = mp.mpf(0)
        even = quantize_p_symmetric(table2, "even", 2, trunc, ctx)
        odd = quantize_p_symmetric(table2, "odd", 2, trunc, ctx)
        for lv, ref in zip(even, (1, 5)):
            worst_o = max(worst_o, abs(lv.E - ref))
        for lv, ref in zip(odd, (3, 7)):
            worst_o = max(worst_o, abs(lv.E - ref))
        checks.append(("n2_oracle", worst_o < mp.mpf("1e-12"), f"max |E - ref| = {_num(worst_o, 3)}"))

    all_ok = True
    for name, ok, detail in checks:
        print(f"{name}: {'ok' if ok else 'FAIL'} ({detail})")
        all_ok = all_ok and ok
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=int, required=True, help="potential exponent (>= 2)")
    common.add_argument("--pmax", type=int, default=100, help="truncation order p+q <= pmax")
    common.add_argument("--radius", default="8", help="evaluation radius (decimal or fraction)")
    common.add_argument(
        "--digits",
        type=int,
        default=None,
        help=f"significant digits (default {ENV_DIGITS} or 40)",
    )
    common.add_argument("--pair", type=int, default=0, help="wedge pair index")
    common.add_argument("--lambda", dest="lam", default="5", help="contour extent")
    common.add_argument(
        "--format",
        choices=("json", "csv"),
        default=None,
        help="output format (default json; csv for the plot-data commands scan and wavefunction)",
    )
    common.add_argument("--output", default=None, help="output file (default stdout)")
    common.add_argument(
        "--parity",
        choices=("even", "odd", "both"),
        default="both",
        help="parity selection on the p-symmetric pair",
    )

    parser = argparse.ArgumentParser(
        prog="ptspec",
        description="High-precision spectra of -psi'' - (iz)^N psi = E psi "
        "via truncated double power series.",
    )
    parser.add_argument(
        "--selfcheck",
        action="store_true",
        help="run internal consistency checks and exit nonzero on failure",
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("spectrum", parents=[common], help="first n eigenvalues of a pair")
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--emax", default="100", help="scan ceiling in E")
    p.add_argument("--step", default="0.05", help="scan grid step")
    p.add_argument("--health-emax", dest="health_emax", default="30")
    p.add_argument("--force", action="store_true", help="proceed despite failed health check")

    p = sub.add_parser("scan", parents=[common], help="sample Im c on an energy grid")
    p.add_argument("--emin", default="0")
    p.add_argument("--emax", default="30")
    p.add_argument("--step", default="0.05")

    p = sub.add_parser("nodes", parents=[common], help="zeros of one eigenfunction")
    p.add_argument("--level", type=int, default=0)
    p.add_argument("--region", default=None, help="re_min,re_max,im_min,im_max")
    p.add_argument("--grid-step", dest="grid_step", default="0.05")

    p = sub.add_parser("expect", parents=[common], help="PT expectation values")
    p.add_argument("--level", type=int, default=0)
    p.add_argument("--moments", default="1,2,3,4", help="comma list of moment orders")
    p.add_argument("--contour", choices=("real_line", "wedge_rays"), default="real_line")

    sub.add_parser("wedges", parents=[common], help="list PT wedge pairs")

    p = sub.add_parser("wavefunction", parents=[common], help="psi samples on the real line")
    p.add_argument("--level", type=int, default=0)
    p.add_argument("--xmin", default="-5")
    p.add_argument("--xmax", default="5")
    p.add_argument("--step", default="0.05")

    p = sub.add_parser("selfcheck", help="internal consistency checks")
    p.add_argument("--digits", type=int, default=None)

    return parser


_DISPATCH = {
    "spectrum": _cmd_spectrum,
    "scan": _cmd_scan,
    "nodes": _cmd_nodes,
    "expect": _cmd_expect,
    "wedges": _cmd_wedges,
    "wavefunction": _cmd_wavefunction,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "selfcheck":
            return _cmd_selfcheck(args)
        if args.selfcheck:
            rc = _cmd_selfcheck(args)
            if rc or args.command is None:
                return rc
        if args.command is None:
            parser.error("a subcommand is required (or use --selfcheck)")
        if args.digits is None:
            args.digits = _default_digits()
        cfg = _config(args)
        return _DISPATCH[args.command](cfg, args)
    except ParameterError as exc:
        print(f"ptspec: {exc}", file=sys.stderr)
        return 2
    except PtspecError as exc:
        print(f"ptspec: {exc}", file=sys.stderr)
        return 1
