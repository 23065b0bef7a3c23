"""Complex zeros of eigenfunctions.

At a fixed level the eigenfunction collapses to a polynomial in w = iz,
so node hunting is: coarse |psi| minima on a rectangular grid at low
precision, then a full-precision complex Newton polish, dedup, and
classification.  The interesting zeros of the PT problem come in two
families: finitely many strung along an arch below the real axis
(their count equals the level index), and an infinite ladder up the
positive imaginary axis.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath as mp

from . import series
from .errors import DivergenceError, ParameterError, RadiusError
from .precision import ComplexHP, Fractionable, PrecisionContext, as_fraction
from .quantize import EnergyLevel, level_weights
from .series import CoefficientTable, TruncationParams

__all__ = ["NodeSet", "turning_points", "newton_zero", "find_nodes"]

_SEED_CTX = PrecisionContext(10)
_NEWTON_CAP = 100
_AXIS_TOL = mp.mpf("1e-10")


@dataclass(frozen=True)
class NodeSet:
    """Classified zeros of one eigenfunction.

    axis_nodes lie on the positive imaginary axis; everything else is
    an arch node (including the purely imaginary node below the axis
    that odd levels have).  turning_points are the classical turning
    points adjacent to the pair's wedges.  failed_seeds records grid
    minima whose Newton polish did not converge.
    """

    level: EnergyLevel
    axis_nodes: tuple
    arch_nodes: tuple
    turning_points: tuple
    failed_seeds: tuple

    def count(self) -> int:
        return len(self.axis_nodes) + len(self.arch_nodes)


def turning_points(level: EnergyLevel, ctx: PrecisionContext):
    """Turning points (iz)**N = -E whose direction lies in the pair's
    wedges, sorted by angle."""
    n = level.pair.n_exponent
    with ctx.workdps():
        e_val = mp.mpf(level.E)
        if e_val == 0:
            return ()
        rho = abs(e_val) ** (mp.mpf(1) / n)
        phi = mp.pi if e_val > 0 else mp.mpf(0)
        half = mp.pi * mp.mpf(level.pair.half_width.numerator) / level.pair.half_width.denominator
        centers = [
            level.pair.theta_right_radians(ctx),
            level.pair.theta_left_radians(ctx),
        ]
        picked = []
        for k in range(n):
            z = -mp.mpc(0, 1) * rho * mp.exp(mp.mpc(0, 1) * (phi + 2 * mp.pi * k) / n)
            ang = mp.arg(z)
            for center in centers:
                d = ang - center
                while d > mp.pi:
                    d -= 2 * mp.pi
                while d <= -mp.pi:
                    d += 2 * mp.pi
                if abs(d) < half:
                    picked.append((ang, z))
                    break
        picked.sort(key=lambda t: t[0])
        return tuple(z for _, z in picked)


def _level_poly(table: CoefficientTable, level: EnergyLevel, ctx: PrecisionContext):
    alpha, beta = level_weights(level)
    return series.space_polynomial(table, level.E, alpha, beta, ctx)


def newton_zero(
    table: CoefficientTable,
    level: EnergyLevel,
    z0,
    tol,
    trunc: TruncationParams,
    ctx: PrecisionContext,
) -> ComplexHP:
    """Polish one seed to a zero of the eigenfunction polynomial.

    Stops when the Newton step drops below tol*max(1, |z|).  Raises
    RadiusError when the iterate leaves the validated disk and
    DivergenceError after 100 steps.
    """
    poly = _level_poly(table, level, ctx)
    with ctx.workdps():
        tol = mp.mpf(tol)
        if tol <= 0:
            raise ParameterError("tol must be positive")
        radius = trunc.radius_mpf(ctx)
        z = mp.mpc(z0)
        for _ in range(_NEWTON_CAP):
            if abs(z) > radius:
                raise RadiusError(
                    f"Newton iterate left the validated disk |z| <= {trunc.radius}"
                )
            psi, dpsi = series.poly_psi_d(poly, z)
            if dpsi == 0:
                raise DivergenceError("psi' vanished during Newton iteration")
            step = psi / dpsi
            z = z - step
            if abs(step) <= tol * max(mp.mpf(1), abs(z)):
                return z
        raise DivergenceError(f"no convergence within {_NEWTON_CAP} Newton steps")


def _default_region(level: EnergyLevel, ctx: PrecisionContext):
    """Box around the sub-axis arch: |re| <= 1.2*|E|**(1/N), -1.2L <= im <= 0."""
    with ctx.workdps():
        n = level.pair.n_exponent
        scale = mp.mpf(12) / 10 * abs(mp.mpf(level.E)) ** (mp.mpf(1) / n)
        ext = as_fraction(mp.nstr(scale, 3))
    return (-ext, ext, -ext, Fraction(0))


def find_nodes(
    table: CoefficientTable,
    level: EnergyLevel,
    region: Optional[tuple] = None,
    grid_step: Fractionable = Fraction(1, 20),
    tol=None,
    trunc: TruncationParams = None,
    ctx: PrecisionContext = None,
) -> NodeSet:
    """Locate all eigenfunction zeros inside a rectangular region.

    region is (re_min, re_max, im_min, im_max) and defaults to the
    arch box, where the zero count equals the level index.  Grid
    minima of |psi| (8-neighbor, computed at low precision) seed the
    full-precision Newton polish; results are deduplicated within
    10*tol, classified as axis nodes (|re z| < 1e-10 and im z > 0) or
    arch nodes, and sorted by (im, re).
    """
    if ctx is None:
        ctx = PrecisionContext()
    if trunc is None:
        trunc = TruncationParams(table.pmax)
    if tol is None:
        tol = ctx.tolerance()
    if region is None:
        region = _default_region(level, ctx)
    re_min, re_max, im_min, im_max = (as_fraction(v) for v in region)
    if re_min >= re_max or im_min >= im_max:
        raise ParameterError(f"degenerate region {region!r}")
    step = as_fraction(grid_step)
    if step <= 0:
        raise ParameterError(f"grid_step must be positive, got {grid_step!r}")

    cols = int((re_max - re_min) / step) + 1
    rows = int((im_max - im_min) / step) + 1
    if cols < 3 or rows < 3:
        raise ParameterError("region too small for the grid step (needs >= 3x3 points)")

    # cheap coarse pass: |psi| on the grid at reduced precision
    seed_poly = _level_poly(table, level, _SEED_CTX)
    with _SEED_CTX.workdps():
        mags = []
        for i in range(rows):
            im = _SEED_CTX.mpf(im_min + i * step)
            row = []
            for j in range(cols):
                re = _SEED_CTX.mpf(re_min + j * step)
                row.append(abs(series.poly_psi(seed_poly, mp.mpc(re, im))))
            mags.append(row)

    seeds = []
    for i in range(1, rows - 1):
        for j in range(1, cols - 1):
            m0 = mags[i][j]
            if all(
                m0 <= mags[i + di][j + dj]
                for di in (-1, 0, 1)
                for dj in (-1, 0, 1)
                if (di, dj) != (0, 0)
            ):
                seeds.append((re_min + j * step, im_min + i * step))

    with ctx.workdps():
        tol = mp.mpf(tol)
        margin = ctx.mpf(2 * step)
        lo_re, hi_re = ctx.mpf(re_min) - margin, ctx.mpf(re_max) + margin
        lo_im, hi_im = ctx.mpf(im_min) - margin, ctx.mpf(im_max) + margin
        found = []
        failed = []
        for re_f, im_f in seeds:
            z0 = mp.mpc(ctx.mpf(re_f), ctx.mpf(im_f))
            try:
                z = newton_zero(table, level, z0, tol, trunc, ctx)
            except (RadiusError, DivergenceError):
                failed.append(z0)
                continue
            if not (lo_re <= z.real <= hi_re and lo_im <= z.imag <= hi_im):
                continue  # wandered off to a zero outside the requested box
            if any(abs(z - other) < 10 * tol for other in found):
                continue
            found.append(z)

        found.sort(key=lambda z: (z.imag, z.real))
        on_axis = _AXIS_TOL  # coarser than the Newton tol on purpose
        axis = tuple(z for z in found if abs(z.real) < on_axis and z.imag > 0)
        arch = tuple(z for z in found if not (abs(z.real) < on_axis and z.imag > 0))
    return NodeSet(
        level=level,
        axis_nodes=axis,
        arch_nodes=arch,
        turning_points=turning_points(level, ctx),
        failed_seeds=tuple(failed),
    )
