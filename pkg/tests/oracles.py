"""Independent oracles the tests compare against.

Nothing here imports the solver internals beyond the polynomial
evaluators needed for the quadrature cross-check; reference values are
produced by separate algorithms (a fresh dictionary-based recursion,
float shooting integrations, tanh-sinh quadrature) so agreement is
meaningful.
"""

from fractions import Fraction
from math import factorial

import mpmath as mp
import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from ptspec import level_weights
from ptspec.series import space_polynomial, poly_psi


def brute_tables(n_exponent, pmax):
    """Recompute both coefficient families with a plain dict recursion.

    Same recurrences, different data layout and iteration order from
    the library's table builder.
    """
    a = {(0, 0): Fraction(1)}
    b = {(0, 0): Fraction(1)}
    for s in range(1, pmax + 1):
        for p in range(s + 1):
            q = s - p
            m = (n_exponent + 2) * p + 2 * q
            rhs_a = a.get((p - 1, q), Fraction(0)) + a.get((p, q - 1), Fraction(0))
            rhs_b = b.get((p - 1, q), Fraction(0)) + b.get((p, q - 1), Fraction(0))
            a[(p, q)] = rhs_a / ((m - 1) * m)
            b[(p, q)] = rhs_b / (m * (m + 1))
    return a, b


def closed_a0q(q):
    return Fraction(1, factorial(2 * q))


def closed_b0q(q):
    return Fraction(1, factorial(2 * q + 1))


def closed_ap0(n_exponent, p):
    out = Fraction(1)
    for j in range(1, p + 1):
        m = (n_exponent + 2) * j
        out /= (m - 1) * m
    return out


def closed_bp0(n_exponent, p):
    out = Fraction(1)
    for j in range(1, p + 1):
        m = (n_exponent + 2) * j
        out /= m * (m + 1)
    return out


def shoot_eigenvalue(n_exponent, theta, bracket, s_inf=12.0):
    """Shooting eigenvalue from a float ODE integration.

    Integrates the wavefunction along the ray z = t*s_inf*e^{i theta}
    from the asymptotic region to the origin, starting from the
    decaying WKB branch.  With the left-wedge solution taken as the PT
    image of the right one, the Wronskian matching condition at z = 0
    collapses to Re[conj(psi) * psi'] = 0, which is immune to the
    overall normalization of the shot.
    """
    zs = s_inf * np.exp(1j * theta)

    def g(e_val):
        k = np.sqrt(e_val + (1j * zs) ** n_exponent + 0j)
        d = 1j * k
        if (d * np.exp(1j * theta)).real > 0:
            d = -d

        def rhs(t, y):
            psi = y[0] + 1j * y[1]
            chi = y[2] + 1j * y[3]
            z = t * zs
            acc = -zs * zs * (e_val + (1j * z) ** n_exponent) * psi
            return [chi.real, chi.imag, acc.real, acc.imag]

        sol = solve_ivp(
            rhs,
            (1.0, 0.0),
            [1.0, 0.0, (zs * d).real, (zs * d).imag],
            method="DOP853",
            rtol=1e-13,
            atol=1e-13,
        )
        psi0 = sol.y[0, -1] + 1j * sol.y[1, -1]
        dpsi0 = (sol.y[2, -1] + 1j * sol.y[3, -1]) / zs
        return (np.conj(psi0) * dpsi0).real

    return brentq(g, bracket[0], bracket[1], xtol=1e-13, rtol=8.9e-16)


def parity_shoot_eigenvalue(power, parity, bracket, s_inf=10.0):
    """Eigenvalue of -phi'' + s^power phi = eps*phi by real shooting.

    Integrates inward from the decaying WKB branch; even states are
    roots of phi'(0), odd states of phi(0).
    """

    def g(eps):
        def rhs(s, y):
            return [y[1], (s**power - eps) * y[0]]

        k = np.sqrt(s_inf**power - eps)
        sol = solve_ivp(
            rhs, (s_inf, 0.0), [1.0, -k], method="DOP853", rtol=1e-13, atol=1e-13
        )
        return sol.y[1, -1] if parity == "even" else sol.y[0, -1]

    return brentq(g, bracket[0], bracket[1], xtol=1e-13, rtol=8.9e-16)


def quad_moment(table, level, m, lam, trunc, ctx):
    """<z^m> on [-lam, lam] by mpmath's adaptive tanh-sinh quadrature.

    Independent of the solver's fixed Gauss-Legendre panels.
    """
    alpha, beta = level_weights(level)
    poly = space_polynomial(table, level.E, alpha, beta, ctx)
    with ctx.workdps():
        lam_f = ctx.mpf(lam)

        def num(x):
            psi = poly_psi(poly, x)
            return psi * psi * x**m

        def den(x):
            psi = poly_psi(poly, x)
            return psi * psi

        return mp.quad(num, [-lam_f, 0, lam_f]) / mp.quad(den, [-lam_f, 0, lam_f])
