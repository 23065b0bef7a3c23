"""Eigenvalue quantization.

For a PT wedge pair the eigenvalues are the real zeros of Im c(E),
where c(E) = -psi1(z*)/psi2(z*) at a probe point z* = r*exp(i*theta)
on the right wedge's center ray: real c makes psi = psi1 + c*psi2
decay in both wedges at once.

The parity pair of even N is degenerate for this method (Im c vanishes
identically there); its eigenstates are pure psi1 (even) or psi2 (odd)
and are quantized by the real-valued decay proxy of the corresponding
single series, scanned toward the side where the pair's wedges support
bound states: increasing E when the pair sits on the real axis,
decreasing E when it sits on the imaginary axis.

All scans run on exact Fraction grids; per-angle energy polynomials
make single evaluations cheap, so refinement works at full precision
throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import mpmath as mp

from . import series
from .errors import (
    BracketError,
    ParameterError,
    PoleError,
    TruncationError,
)
from .precision import ComplexHP, Fractionable, PrecisionContext, RealHP, as_fraction
from .series import CoefficientTable, TruncationParams
from .wedges import WedgePair, polar_point, pt_pairs

__all__ = [
    "ScanPoint",
    "LevelDiagnostics",
    "EnergyLevel",
    "HealthEntry",
    "HealthReport",
    "TAIL_THRESHOLD_EXPONENT",
    "level_weights",
    "connection_coefficient",
    "scan_im_c",
    "refine_root",
    "spectrum",
    "quantize_p_symmetric",
    "health_check",
]

# tail-dominance threshold 10**TAIL_THRESHOLD_EXPONENT, calibrated so the
# known-good configurations (N=3 r=8, N=7 r=3) pass and the known-bad
# ones (N=7 r=8, N=3 P=10) fail with a wide margin on both sides
TAIL_THRESHOLD_EXPONENT = -10

DEFAULT_SCAN_STEP = Fraction(1, 20)
DEFAULT_ENERGY_CAP = Fraction(100)
_WINDOW_STEPS = 200


@dataclass(frozen=True)
class ScanPoint:
    """One grid sample of the connection coefficient."""

    E: RealHP
    c_re: RealHP
    c_im: RealHP
    flag: str  # "ok" or "pole"


@dataclass(frozen=True)
class LevelDiagnostics:
    """Truncation metadata carried by every level."""

    pmax: int
    radius: Fraction
    digits: int
    est_error: RealHP
    stable: bool


@dataclass(frozen=True)
class EnergyLevel:
    """A refined eigenvalue.

    c is the (real) connection coefficient for Im-c levels and None for
    parity levels, where parity is "even" or "odd" instead.
    """

    n: int
    E: RealHP
    c: Optional[RealHP]
    pair: WedgePair
    diagnostics: LevelDiagnostics
    parity: Optional[str] = None


def level_weights(level: EnergyLevel):
    """(alpha, beta) with psi = alpha*psi1 + beta*psi2 for the level."""
    if level.parity == "even":
        return mp.mpf(1), mp.mpf(0)
    if level.parity == "odd":
        return mp.mpf(0), mp.mpf(1)
    if level.c is None:
        raise ParameterError("level carries neither c nor a parity tag")
    return mp.mpf(1), level.c


def _z_probe(pair: WedgePair, which_side: str, radius: Fraction, ctx: PrecisionContext) -> ComplexHP:
    """r*exp(i*pi*theta) for the chosen wedge center."""
    if which_side not in ("right", "left"):
        raise ParameterError(f"which_side must be 'right' or 'left', got {which_side!r}")
    theta = pair.theta_right if which_side == "right" else pair.theta_left
    return polar_point(radius, theta, ctx)


def _c_from_polys(poly_a, poly_b, E, ctx: PrecisionContext) -> ComplexHP:
    """c = -psi1/psi2 from collapsed polynomials, with a pole guard."""
    with ctx.workdps():
        p1 = series.eval_energy_poly(poly_a, E)
        p2 = series.eval_energy_poly(poly_b, E)
        guard = mp.mpf(10) ** (-(ctx.digits // 2))
        if abs(p2) < guard * abs(p1):
            raise PoleError(
                f"psi2 vanishes at E={mp.nstr(mp.mpf(E), 17)} (|psi2/psi1|="
                f"{mp.nstr(abs(p2) / max(abs(p1), mp.mpf('1e-999')), 5)})"
            )
        return -p1 / p2


def connection_coefficient(
    table: CoefficientTable,
    pair: WedgePair,
    E,
    trunc: TruncationParams,
    ctx: PrecisionContext,
    which_side: str = "right",
) -> ComplexHP:
    """c(E) at the probe point of the chosen wedge (default right).

    For real E the left side gives the complex conjugate, so both sides
    share the same Im c zeros.
    """
    z_star = _z_probe(pair, which_side, trunc.radius, ctx)
    poly_a, poly_b = series.energy_polynomials(table, z_star, ctx)
    return _c_from_polys(poly_a, poly_b, E, ctx)


def _fraction_grid(e_min: Fraction, e_max: Fraction, step: Fraction):
    if step <= 0:
        raise ParameterError(f"step must be positive, got {step}")
    if e_max <= e_min:
        raise ParameterError(f"empty energy window [{e_min}, {e_max}]")
    n = int((e_max - e_min) / step)
    return [e_min + j * step for j in range(n + 1)]


def scan_im_c(
    table: CoefficientTable,
    pair: WedgePair,
    e_min: Fractionable,
    e_max: Fractionable,
    step: Fractionable,
    trunc: TruncationParams,
    ctx: PrecisionContext,
    which_side: str = "right",
):
    """Sample c(E) on the exact grid e_min + j*step, j = 0..

    Points where psi2 (nearly) vanishes are flagged "pole" and must be
    skipped when bracketing sign changes of Im c.
    """
    grid = _fraction_grid(as_fraction(e_min), as_fraction(e_max), as_fraction(step))
    z_star = _z_probe(pair, which_side, trunc.radius, ctx)
    poly_a, poly_b = series.energy_polynomials(table, z_star, ctx)
    points = []
    with ctx.workdps():
        for ef in grid:
            ev = ctx.mpf(ef)
            try:
                c = _c_from_polys(poly_a, poly_b, ev, ctx)
                points.append(ScanPoint(ev, c.real, c.imag, "ok"))
            except PoleError:
                points.append(ScanPoint(ev, mp.inf, mp.inf, "pole"))
    return tuple(points)


def _brackets(points) -> list:
    """Sign-change intervals of c_im between consecutive ok points."""
    out = []
    prev = None
    for pt in points:
        if pt.flag != "ok":
            prev = None
            continue
        if prev is not None and mp.sign(prev.c_im) * mp.sign(pt.c_im) < 0:
            out.append((prev.E, pt.E))
        prev = pt
    return out


def _hybrid_root(f: Callable, lo, hi, f_lo, f_hi, tol) -> RealHP:
    """Bracketed root of a smooth real function: bisection to moderate
    width, then bracket-safeguarded secant down to tol (on E)."""
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    coarse = max(mp.mpf("1e-5"), tol)
    while hi - lo > coarse:
        mid = (lo + hi) / 2
        f_mid = f(mid)
        if f_mid == 0:
            return mid
        if mp.sign(f_mid) == mp.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid

    x_prev, f_prev = lo, f_lo
    x_cur, f_cur = hi, f_hi
    for _ in range(200):
        if hi - lo <= tol:
            break
        x_new = None
        if f_cur != f_prev:
            cand = x_cur - f_cur * (x_cur - x_prev) / (f_cur - f_prev)
            if lo < cand < hi:
                x_new = cand
        if x_new is None:
            x_new = (lo + hi) / 2
        f_new = f(x_new)
        if f_new == 0:
            return x_new
        if mp.sign(f_new) == mp.sign(f_lo):
            lo, f_lo = x_new, f_new
        else:
            hi, f_hi = x_new, f_new
        x_prev, f_prev = x_cur, f_cur
        x_cur, f_cur = x_new, f_new
    return (lo + hi) / 2


def _refine_im_c(table, pair, bracket, tol, trunc, ctx, which_side) -> RealHP:
    z_star = _z_probe(pair, which_side, trunc.radius, ctx)
    poly_a, poly_b = series.energy_polynomials(table, z_star, ctx)

    def f(ev):
        return _c_from_polys(poly_a, poly_b, ev, ctx).imag

    with ctx.workdps():
        lo, hi = mp.mpf(bracket[0]), mp.mpf(bracket[1])
        if not lo < hi:
            raise ParameterError(f"bracket must satisfy lo < hi, got {bracket}")
        f_lo, f_hi = f(lo), f(hi)
        if f_lo == 0:
            return lo
        if f_hi == 0:
            return hi
        if mp.sign(f_lo) == mp.sign(f_hi):
            raise BracketError(
                f"Im c has no sign change on [{mp.nstr(lo, 12)}, {mp.nstr(hi, 12)}]"
            )
        return _hybrid_root(f, lo, hi, f_lo, f_hi, mp.mpf(tol))


def refine_root(
    table: CoefficientTable,
    pair: WedgePair,
    bracket,
    tol,
    trunc: TruncationParams,
    ctx: PrecisionContext,
    n: int = 0,
    which_side: str = "right",
) -> EnergyLevel:
    """Refine one Im c sign change to an EnergyLevel.

    est_error is the shift of the root when the probe radius drops to
    0.9r; it bounds the finite-radius truncation error.  The stable
    flag clears when est_error exceeds 10**(-digits/2).  The level
    index n is only recorded, not used.
    """
    with ctx.workdps():
        tol = mp.mpf(tol)
        if tol <= 0:
            raise ParameterError("tol must be positive")
        e_root = _refine_im_c(table, pair, bracket, tol, trunc, ctx, which_side)
        c_val = connection_coefficient(table, pair, e_root, trunc, ctx, which_side)

        inner = trunc.scaled_radius(9, 10)
        delta = max(mp.mpf("1e-6"), 100 * tol * max(mp.mpf(1), abs(e_root)))
        est = mp.inf
        for lo, hi in ((e_root - delta, e_root + delta), bracket):
            try:
                e_inner = _refine_im_c(table, pair, (lo, hi), tol, inner, ctx, which_side)
                est = abs(e_root - e_inner)
                break
            except (BracketError, PoleError):
                continue
        stable = bool(est <= mp.mpf(10) ** (-(ctx.digits // 2)))
        diags = LevelDiagnostics(trunc.pmax, trunc.radius, ctx.digits, est, stable)
        return EnergyLevel(n, e_root, c_val.real, pair, diags)


def spectrum(
    table: CoefficientTable,
    pair: WedgePair,
    n_levels: int,
    trunc: TruncationParams,
    ctx: PrecisionContext,
    e_max: Fractionable = DEFAULT_ENERGY_CAP,
    step: Fractionable = DEFAULT_SCAN_STEP,
    which_side: str = "right",
):
    """First n_levels eigenvalues of the pair, in increasing order.

    Scans Im c upward from zero in windows, refining each sign change.
    Raises TruncationError if the levels do not fit below e_max.
    """
    if not isinstance(n_levels, int) or n_levels < 1:
        raise ParameterError(f"n_levels must be a positive integer, got {n_levels!r}")
    if pair.parity_swapped():
        raise ParameterError(
            "Im c vanishes identically on a parity pair; use quantize_p_symmetric"
        )
    step_f = as_fraction(step)
    cap = as_fraction(e_max)
    tol = ctx.tolerance(5)

    points: list = []
    levels: list = []
    window_lo = Fraction(0)
    while len(levels) < n_levels:
        if window_lo >= cap:
            raise TruncationError(
                f"only {len(levels)} of {n_levels} levels found below e_max={cap}"
            )
        window_hi = min(window_lo + _WINDOW_STEPS * step_f, cap)
        chunk = scan_im_c(table, pair, window_lo, window_hi, step_f, trunc, ctx, which_side)
        points.extend(chunk if not points else chunk[1:])
        brackets = _brackets(points)
        for bracket in brackets[len(levels):]:
            if len(levels) >= n_levels:
                break
            levels.append(
                refine_root(table, pair, bracket, tol, trunc, ctx, len(levels), which_side)
            )
        window_lo = window_hi
    return tuple(levels)


def _parity_geometry(pair: WedgePair):
    """Probe axis and scan direction for a parity pair.

    Real-axis pair ({0, pi}): probe at z = r, spectrum grows upward.
    Imaginary-axis pair ({+pi/2, -pi/2}): probe at z = i*r, where the
    confining direction flips and the bound spectrum is negative.
    """
    if pair.theta_right == 0:
        return "real", 1
    if pair.theta_right == Fraction(1, 2):
        return "imag", -1
    raise ParameterError(f"pair {pair.index} is not a parity pair")


def quantize_p_symmetric(
    table: CoefficientTable,
    parity: str,
    n_levels: int,
    trunc: TruncationParams,
    ctx: PrecisionContext,
    step: Fractionable = DEFAULT_SCAN_STEP,
    e_max: Fractionable = DEFAULT_ENERGY_CAP,
):
    """Parity spectrum on the p-symmetric pair of an even N.

    Levels are roots in E of the decay proxy: the single series psi1
    (even) or psi2 (odd) evaluated on the pair's symmetry axis at
    radius r.  On the probe axis that series is real (after stripping
    the constant phase of psi2), so plain sign-change scanning applies.
    n orders levels by distance from zero; c is undefined.
    """
    if parity not in ("even", "odd"):
        raise ParameterError(f"parity must be 'even' or 'odd', got {parity!r}")
    if not isinstance(n_levels, int) or n_levels < 1:
        raise ParameterError(f"n_levels must be a positive integer, got {n_levels!r}")
    psym = [p for p in pt_pairs(table.n_exponent) if p.p_symmetric]
    if not psym:
        raise ParameterError(f"N={table.n_exponent} has no p-symmetric pair (N must be even)")
    pair = psym[0]
    axis, direction = _parity_geometry(pair)

    def make_reader(radius: Fraction):
        z_star = _z_probe(pair, "right", radius, ctx)
        poly_a, poly_b = series.energy_polynomials(table, z_star, ctx)
        if parity == "even":
            poly = poly_a
            part = "re"
        else:
            poly = poly_b
            # at z = r the odd series is purely imaginary, at z = i*r real
            part = "im" if axis == "real" else "re"

        def f(ev):
            val = series.eval_energy_poly(poly, ev)
            return val.real if part == "re" else val.imag

        return f

    step_f = as_fraction(step)
    cap = as_fraction(e_max)
    tol = ctx.tolerance(5)

    with ctx.workdps():
        f_outer = make_reader(trunc.radius)
        f_inner = make_reader(trunc.radius * Fraction(9, 10))
        levels: list = []
        window_lo = Fraction(0)
        prev_e = None
        prev_f = None
        while len(levels) < n_levels:
            if window_lo >= cap:
                raise TruncationError(
                    f"only {len(levels)} of {n_levels} parity levels found below |E|={cap}"
                )
            window_hi = min(window_lo + _WINDOW_STEPS * step_f, cap)
            grid = _fraction_grid(window_lo, window_hi, step_f)
            for ef in grid:
                ev = ctx.mpf(direction * ef)
                fv = f_outer(ev)
                if prev_f is not None and mp.sign(prev_f) * mp.sign(fv) < 0:
                    lo, hi = (prev_e, ev) if prev_e < ev else (ev, prev_e)
                    e_root = _hybrid_root(f_outer, lo, hi, f_outer(lo), f_outer(hi), tol)
                    delta = max(mp.mpf("1e-6"), 100 * tol * max(mp.mpf(1), abs(e_root)))
                    est = mp.inf
                    g_lo, g_hi = f_inner(e_root - delta), f_inner(e_root + delta)
                    if mp.sign(g_lo) * mp.sign(g_hi) < 0:
                        e_in = _hybrid_root(f_inner, e_root - delta, e_root + delta, g_lo, g_hi, tol)
                        est = abs(e_root - e_in)
                    stable = bool(est <= mp.mpf(10) ** (-(ctx.digits // 2)))
                    diags = LevelDiagnostics(trunc.pmax, trunc.radius, ctx.digits, est, stable)
                    levels.append(
                        EnergyLevel(len(levels), e_root, None, pair, diags, parity)
                    )
                    if len(levels) >= n_levels:
                        break
                prev_e, prev_f = ev, fv
            window_lo = window_hi
        return tuple(levels)


@dataclass(frozen=True)
class HealthEntry:
    """Truncation diagnostics for one wedge pair."""

    pair_index: int
    theta_right: Fraction
    theta_left: Fraction
    tail_right: RealHP
    tail_left: RealHP
    c_discrepancy: RealHP
    tail_ok: bool
    c_ok: bool

    @property
    def passed(self) -> bool:
        return self.tail_ok and self.c_ok


@dataclass(frozen=True)
class HealthReport:
    """Per-pair health entries plus the overall verdict."""

    n_exponent: int
    pmax: int
    radius: Fraction
    e_max: Fraction
    entries: tuple
    passed: bool


def health_check(
    table: CoefficientTable,
    trunc: TruncationParams,
    e_max: Fractionable,
    ctx: PrecisionContext,
) -> HealthReport:
    """Diagnose whether (pmax, radius) is trustworthy up to E = e_max.

    For every wedge angle the largest boundary term (p + q = pmax) must
    be negligible against the partial sum, and c(r) must agree with
    c(0.9r).  Purely diagnostic: never raises on bad health.
    """
    cap = as_fraction(e_max)
    pairs = pt_pairs(table.n_exponent)
    tail_threshold = mp.mpf(10) ** TAIL_THRESHOLD_EXPONENT
    c_threshold = mp.mpf(10) ** (-(ctx.digits // 4))
    entries = []
    with ctx.workdps():
        ev = ctx.mpf(cap)
        inner = trunc.scaled_radius(9, 10)
        for pair in pairs:
            z_r = _z_probe(pair, "right", trunc.radius, ctx)
            z_l = _z_probe(pair, "left", trunc.radius, ctx)
            tail_r = series.tail_ratio(table, z_r, ev, ctx)
            tail_l = series.tail_ratio(table, z_l, ev, ctx)
            c_disc = mp.inf
            for probe in (ev, ev * mp.mpf(97) / 96):
                try:
                    c_out = connection_coefficient(table, pair, probe, trunc, ctx)
                    c_in = connection_coefficient(table, pair, probe, inner, ctx)
                    c_disc = abs(c_out - c_in)
                    break
                except PoleError:
                    continue
            entries.append(
                HealthEntry(
                    pair_index=pair.index,
                    theta_right=pair.theta_right,
                    theta_left=pair.theta_left,
                    tail_right=tail_r,
                    tail_left=tail_l,
                    c_discrepancy=c_disc,
                    tail_ok=bool(max(tail_r, tail_l) < tail_threshold),
                    c_ok=bool(c_disc < c_threshold),
                )
            )
    entries = tuple(entries)
    return HealthReport(
        n_exponent=table.n_exponent,
        pmax=trunc.pmax,
        radius=trunc.radius,
        e_max=cap,
        entries=entries,
        passed=all(e.passed for e in entries),
    )
