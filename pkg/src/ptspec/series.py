"""Coefficient tables and truncated-series evaluation.

The equation -psi''(z) - (iz)**N psi(z) = E psi(z) has two fundamental
solutions, analytic at z = 0, expandable in the variable w = iz:

    psi1 = sum_{p,q} a[p,q] * w**((N+2)*p + 2*q)     * E**q
    psi2 = sum_{p,q} b[p,q] * w**(1 + (N+2)*p + 2*q) * E**q

with a[0,0] = b[0,0] = 1 and the two-term recursions

    (m-1)*m     * a[p,q] = a[p-1,q] + a[p,q-1],   m = (N+2)*p + 2*q
    m2*(m2+1)   * b[p,q] = b[p-1,q] + b[p,q-1],   m2 = (N+2)*p + 2*q

(absent neighbors count as zero).  Coefficients are exact rationals and
depend only on (N, pmax); the series is truncated on the antidiagonal
p + q <= pmax.

Besides the direct evaluator eval_psi, this module offers two collapsed
forms that make repeated evaluation cheap:

* energy_polynomials: at fixed z, psi1 and psi2 become polynomials in E
  (degree pmax).  Used by eigenvalue scans.
* space_polynomial: at fixed E, any combination alpha*psi1 + beta*psi2
  becomes a polynomial in w = iz.  Used by node finding and quadrature.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath as mp

from .errors import ParameterError
from .precision import (
    ComplexHP,
    PrecisionContext,
    RealHP,
    as_fraction,
    complex_str,
)

__all__ = [
    "TruncationParams",
    "CoefficientTable",
    "build_tables",
    "eval_psi",
    "residual",
    "boundary_residual",
    "tail_ratio",
    "wronskian",
    "energy_polynomials",
    "eval_energy_poly",
    "space_polynomial",
    "poly_psi",
    "poly_psi_d",
    "save_table",
    "load_table",
]


@dataclass(frozen=True)
class TruncationParams:
    """Antidiagonal truncation order and evaluation radius.

    The radius is stored exactly (as a Fraction) so reports and cache
    keys never depend on binary float noise.
    """

    pmax: int = 100
    radius: Fraction = Fraction(8)

    def __post_init__(self) -> None:
        if not isinstance(self.pmax, int) or self.pmax < 1:
            raise ParameterError(f"pmax must be a positive integer, got {self.pmax!r}")
        object.__setattr__(self, "radius", as_fraction(self.radius))
        if self.radius <= 0:
            raise ParameterError(f"radius must be positive, got {self.radius}")

    def scaled_radius(self, num: int, den: int) -> "TruncationParams":
        """Same truncation order at radius * num/den (error estimation)."""
        return TruncationParams(self.pmax, self.radius * Fraction(num, den))

    def radius_mpf(self, ctx: PrecisionContext) -> RealHP:
        return ctx.mpf(self.radius)


@dataclass(frozen=True)
class CoefficientTable:
    """Exact series coefficients for one (N, pmax).

    a and b map (p, q) with p + q <= pmax to Fractions.  Instances are
    built by build_tables and must be treated as immutable; tables for
    equal (N, pmax) are interchangeable because the recursion determines
    every entry.
    """

    n_exponent: int
    pmax: int
    a: dict
    b: dict

    def entry_count(self) -> int:
        return len(self.a)


_TABLE_CACHE: dict = {}


def build_tables(n_exponent: int, pmax: int) -> CoefficientTable:
    """Build (or fetch cached) exact coefficient tables for given N, pmax."""
    if not isinstance(n_exponent, int) or n_exponent < 2:
        raise ParameterError(f"N must be an integer >= 2, got {n_exponent!r}")
    if not isinstance(pmax, int) or pmax < 1:
        raise ParameterError(f"pmax must be a positive integer, got {pmax!r}")
    key = (n_exponent, pmax)
    cached = _TABLE_CACHE.get(key)
    if cached is not None:
        return cached

    step = n_exponent + 2
    a = {(0, 0): Fraction(1)}
    b = {(0, 0): Fraction(1)}
    zero = Fraction(0)
    for s in range(1, pmax + 1):
        for p in range(s + 1):
            q = s - p
            m = step * p + 2 * q
            a_src = a.get((p - 1, q), zero) + a.get((p, q - 1), zero)
            b_src = b.get((p - 1, q), zero) + b.get((p, q - 1), zero)
            a[(p, q)] = a_src / ((m - 1) * m)
            b[(p, q)] = b_src / (m * (m + 1))

    table = CoefficientTable(n_exponent, pmax, a, b)
    _TABLE_CACHE[key] = table
    return table


# ---------------------------------------------------------------------------
# float-coefficient snapshots, converted once per (N, pmax, dps)

_FLOAT_CACHE: dict = {}
_FLOAT_CACHE_CAP = 16


def _float_entries(table: CoefficientTable, dps: int):
    """Coefficients as mpf at dps, ordered by (p+q, p).  Cached."""
    key = (table.n_exponent, table.pmax, dps)
    hit = _FLOAT_CACHE.get(key)
    if hit is not None:
        return hit
    step = table.n_exponent + 2
    entries = []
    with mp.workdps(dps):
        for s in range(table.pmax + 1):
            for p in range(s + 1):
                q = s - p
                m = step * p + 2 * q
                af = table.a[(p, q)]
                bf = table.b[(p, q)]
                entries.append(
                    (
                        p,
                        q,
                        m,
                        mp.mpf(af.numerator) / af.denominator,
                        mp.mpf(bf.numerator) / bf.denominator,
                    )
                )
    entries = tuple(entries)
    if len(_FLOAT_CACHE) >= _FLOAT_CACHE_CAP:
        del _FLOAT_CACHE[next(iter(_FLOAT_CACHE))]
    _FLOAT_CACHE[key] = entries
    return entries


def _powers(base: ComplexHP, top: int) -> list:
    out = [mp.mpc(1)]
    for _ in range(top):
        out.append(out[-1] * base)
    return out


def eval_psi(
    table: CoefficientTable,
    z,
    E,
    ctx: PrecisionContext,
):
    """Evaluate the truncated fundamental pair at one point.

    Returns (psi1, psi1', psi2, psi2') as mpc values, derivatives taken
    with respect to z.  Summation follows the fixed antidiagonal order,
    so results are reproducible bit for bit.
    """
    entries = _float_entries(table, ctx.dps)
    with ctx.workdps():
        w = mp.mpc(0, 1) * mp.mpc(z)
        ev = mp.mpf(E)
        top = (table.n_exponent + 2) * table.pmax + 1
        wpow = _powers(w, top)
        epow = _powers(mp.mpc(ev), table.pmax)
        i_unit = mp.mpc(0, 1)

        psi1 = mp.mpc(0)
        dpsi1 = mp.mpc(0)
        psi2 = mp.mpc(0)
        dpsi2 = mp.mpc(0)
        for p, q, m, af, bf in entries:
            eq = epow[q]
            ta = af * eq
            tb = bf * eq
            psi1 += ta * wpow[m]
            psi2 += tb * wpow[m + 1]
            if m > 0:
                dpsi1 += ta * m * wpow[m - 1]
            dpsi2 += tb * (m + 1) * wpow[m]
        return psi1, i_unit * dpsi1, psi2, i_unit * dpsi2


def residual(
    table: CoefficientTable,
    z,
    E,
    ctx: PrecisionContext,
    which: str = "psi1",
):
    """ODE residual -psi'' - (iz)**N psi - E psi of one truncated series.

    Every interior term cancels through the recursion, so the result
    consists purely of boundary (p + q = pmax) contributions; it
    measures the truncation error directly.
    """
    if which not in ("psi1", "psi2"):
        raise ParameterError(f"which must be 'psi1' or 'psi2', got {which!r}")
    entries = _float_entries(table, ctx.dps)
    shift = 0 if which == "psi1" else 1
    col = 3 if which == "psi1" else 4
    with ctx.workdps():
        w = mp.mpc(0, 1) * mp.mpc(z)
        ev = mp.mpf(E)
        top = (table.n_exponent + 2) * table.pmax + table.n_exponent + 2
        wpow = _powers(w, top)
        epow = _powers(mp.mpc(ev), table.pmax)

        psi = mp.mpc(0)
        d2 = mp.mpc(0)  # second derivative in z equals -sum m(m-1) c w**(m-2)
        for entry in entries:
            m = entry[2] + shift
            term = entry[col] * epow[entry[1]]
            psi += term * wpow[m]
            if m > 1:
                d2 += term * m * (m - 1) * wpow[m - 2]
        return d2 - wpow[table.n_exponent] * psi - ev * psi


def boundary_residual(
    table: CoefficientTable,
    z,
    E,
    ctx: PrecisionContext,
    which: str = "psi1",
):
    """Closed form of the residual: -sum over the last antidiagonal of
    c[p,q] * (w**(m+N) E**q + w**m E**(q+1)).  Cheap, and must agree
    with residual() to working precision.
    """
    if which not in ("psi1", "psi2"):
        raise ParameterError(f"which must be 'psi1' or 'psi2', got {which!r}")
    coeffs = table.a if which == "psi1" else table.b
    shift = 0 if which == "psi1" else 1
    step = table.n_exponent + 2
    with ctx.workdps():
        w = mp.mpc(0, 1) * mp.mpc(z)
        ev = mp.mpf(E)
        wn = w ** table.n_exponent
        acc = mp.mpc(0)
        for p in range(table.pmax + 1):
            q = table.pmax - p
            m = step * p + 2 * q + shift
            c = coeffs[(p, q)]
            cf = mp.mpf(c.numerator) / c.denominator
            acc += cf * (ev ** q) * (w ** m) * (wn + ev)
        return -acc


def tail_ratio(
    table: CoefficientTable,
    z,
    E,
    ctx: PrecisionContext,
) -> RealHP:
    """Largest boundary-term magnitude relative to |psi1(z)|.

    This is the convergence diagnostic: well inside the reliable region
    the last antidiagonal is negligible against the sum.
    """
    entries = _float_entries(table, ctx.dps)
    with ctx.workdps():
        w = mp.mpc(0, 1) * mp.mpc(z)
        ev = mp.mpf(E)
        top = (table.n_exponent + 2) * table.pmax
        wpow = _powers(w, top)
        epow = _powers(mp.mpc(ev), table.pmax)
        psi1 = mp.mpc(0)
        worst = mp.mpf(0)
        for p, q, m, af, bf in entries:
            term = af * epow[q] * wpow[m]
            psi1 += term
            if p + q == table.pmax:
                worst = max(worst, abs(term))
        denom = abs(psi1)
        if denom == 0:
            return mp.inf
        return worst / denom


def wronskian(table: CoefficientTable, z, E, ctx: PrecisionContext) -> ComplexHP:
    """psi1 * psi2' - psi1' * psi2; exactly i for the full series."""
    p1, d1, p2, d2 = eval_psi(table, z, E, ctx)
    with ctx.workdps():
        return p1 * d2 - d1 * p2


# ---------------------------------------------------------------------------
# collapsed polynomial forms

_ENERGY_CACHE: dict = {}
_ENERGY_CACHE_CAP = 64

_SPACE_CACHE: dict = {}
_SPACE_CACHE_CAP = 64


def energy_polynomials(table: CoefficientTable, z, ctx: PrecisionContext):
    """Collapse the double series at fixed z into polynomials in E.

    Returns (A, B): tuples with psi1(z, E) = sum_q A[q] E**q and
    psi2(z, E) = sum_q B[q] E**q, both of degree pmax.  Cached per
    (N, pmax, z, dps); eigenvalue scans call this once per angle and
    then evaluate thousands of energies at polynomial cost.
    """
    with ctx.workdps():
        zc = mp.mpc(z)
        key = (table.n_exponent, table.pmax, ctx.dps, complex_str(zc, ctx.dps))
        hit = _ENERGY_CACHE.get(key)
        if hit is not None:
            return hit
        entries = _float_entries(table, ctx.dps)
        w = mp.mpc(0, 1) * zc
        top = (table.n_exponent + 2) * table.pmax + 1
        wpow = _powers(w, top)
        acc_a = [mp.mpc(0) for _ in range(table.pmax + 1)]
        acc_b = [mp.mpc(0) for _ in range(table.pmax + 1)]
        for p, q, m, af, bf in entries:
            acc_a[q] += af * wpow[m]
            acc_b[q] += bf * wpow[m + 1]
        result = (tuple(acc_a), tuple(acc_b))
    if len(_ENERGY_CACHE) >= _ENERGY_CACHE_CAP:
        del _ENERGY_CACHE[next(iter(_ENERGY_CACHE))]
    _ENERGY_CACHE[key] = result
    return result


def eval_energy_poly(coeffs: Sequence[ComplexHP], E) -> ComplexHP:
    """Horner evaluation of an energy polynomial at real E."""
    ev = mp.mpf(E)
    acc = mp.mpc(0)
    for c in reversed(coeffs):
        acc = acc * ev + c
    return acc


def space_polynomial(
    table: CoefficientTable,
    E,
    alpha,
    beta,
    ctx: PrecisionContext,
):
    """Collapse at fixed E: alpha*psi1 + beta*psi2 as a polynomial in w = iz.

    Returns the coefficient tuple C with psi(z) = sum_k C[k] w**k.
    Cached; node searches and contour quadrature reuse one collapse for
    thousands of point evaluations.
    """
    with ctx.workdps():
        ev = mp.mpf(E)
        al = mp.mpc(alpha)
        be = mp.mpc(beta)
        key = (
            table.n_exponent,
            table.pmax,
            ctx.dps,
            mp.nstr(ev, ctx.dps),
            complex_str(al, ctx.dps),
            complex_str(be, ctx.dps),
        )
        hit = _SPACE_CACHE.get(key)
        if hit is not None:
            return hit
        entries = _float_entries(table, ctx.dps)
        epow = _powers(mp.mpc(ev), table.pmax)
        top = (table.n_exponent + 2) * table.pmax + 2
        coeffs = [mp.mpc(0) for _ in range(top)]
        for p, q, m, af, bf in entries:
            eq = epow[q]
            coeffs[m] += al * af * eq
            coeffs[m + 1] += be * bf * eq
        result = tuple(coeffs)
    if len(_SPACE_CACHE) >= _SPACE_CACHE_CAP:
        del _SPACE_CACHE[next(iter(_SPACE_CACHE))]
    _SPACE_CACHE[key] = result
    return result


def poly_psi(coeffs: Sequence[ComplexHP], z) -> ComplexHP:
    """Evaluate a space polynomial at z (Horner in w = iz)."""
    w = mp.mpc(0, 1) * mp.mpc(z)
    acc = mp.mpc(0)
    for c in reversed(coeffs):
        acc = acc * w + c
    return acc


def poly_psi_d(coeffs: Sequence[ComplexHP], z):
    """Evaluate (psi, dpsi/dz) of a space polynomial at z."""
    w = mp.mpc(0, 1) * mp.mpc(z)
    acc = mp.mpc(0)
    dacc = mp.mpc(0)
    for c in reversed(coeffs):
        dacc = dacc * w + acc
        acc = acc * w + c
    return acc, mp.mpc(0, 1) * dacc


# ---------------------------------------------------------------------------
# exact text serialization

_HEADER_RE = re.compile(r"^(\d+)\s+(\d+)$")


def save_table(table: CoefficientTable, path: str) -> None:
    """Write a table as exact integers: header 'N pmax', then one line
    'p q a_num a_den b_num b_den' per entry in (p+q, p) order."""
    lines = [f"{table.n_exponent} {table.pmax}"]
    for s in range(table.pmax + 1):
        for p in range(s + 1):
            q = s - p
            af = table.a[(p, q)]
            bf = table.b[(p, q)]
            lines.append(
                f"{p} {q} {af.numerator} {af.denominator} {bf.numerator} {bf.denominator}"
            )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_table(path: str) -> CoefficientTable:
    """Read a table written by save_table, checking completeness."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        match = _HEADER_RE.match(header)
        if not match:
            raise ParameterError(f"malformed table header {header!r} in {path}")
        n_exponent, pmax = int(match.group(1)), int(match.group(2))
        a: dict = {}
        b: dict = {}
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 6:
                raise ParameterError(f"malformed table row {line!r} in {path}")
            p, q = int(parts[0]), int(parts[1])
            a[(p, q)] = Fraction(int(parts[2]), int(parts[3]))
            b[(p, q)] = Fraction(int(parts[4]), int(parts[5]))
    expected = (pmax + 1) * (pmax + 2) // 2
    if len(a) != expected:
        raise ParameterError(
            f"table in {path} has {len(a)} entries, expected {expected}"
        )
    return CoefficientTable(n_exponent, pmax, a, b)
