"""Independent brute-force oracles used to freeze expected test values.

These deliberately avoid the package's own evaluation paths: plain
term-by-term mpmath sums with a fixed box radius, and mpmath's Cholesky for
pivot checks.
"""
from fractions import Fraction

from mpmath import mp, mpf, mpc, cholesky, exp, fabs, matrix, pi, sqrt

BRUTE_RADIUS = 50


def theta_brute(tau_rows, z=None, m1=None, m2=None, n=BRUTE_RADIUS):
    """Direct lattice sum over the box ||k||_inf <= n, one exp per term."""
    g = len(tau_rows)
    z = [mpc(0)] * g if z is None else [mpc(w) for w in z]
    m1 = [mpf(0)] * g if m1 is None else [mpf(str(x)) for x in m1]
    m2 = [mpf(0)] * g if m2 is None else [mpf(str(x)) for x in m2]
    tau = [[mpc(x) for x in row] for row in tau_rows]
    total = mpc(0)

    def rec(idx, vec):
        nonlocal total
        if idx == g:
            a = [vec[i] + m1[i] for i in range(g)]
            quad = sum(a[i] * tau[i][j] * a[j] for i in range(g) for j in range(g))
            lin = sum(a[i] * (z[i] + m2[i]) for i in range(g))
            total += exp(mpc(0, 1) * pi * quad + 2 * mpc(0, 1) * pi * lin)
            return
        for k in range(-n, n + 1):
            rec(idx + 1, vec + [k])

    rec(0, [])
    return total


def theta_norm_brute(tau_rows, z=None, n=BRUTE_RADIUS):
    """det(Y)^(1/4) exp(-pi y^T Y^-1 y) |theta(tau, z)| via mpmath linalg."""
    g = len(tau_rows)
    z = [mpc(0)] * g if z is None else [mpc(w) for w in z]
    y_mat = matrix([[mpf(mpc(x).imag) for x in row] for row in tau_rows])
    y_vec = matrix([mpf(w.imag) for w in z])
    from mpmath import det as mdet, lu_solve
    dety = mdet(y_mat)
    quad = sum(y_vec[i] * lu_solve(y_mat, y_vec)[i] for i in range(g))
    return dety ** mpf("0.25") * exp(-pi * quad) * fabs(theta_brute(tau_rows, z, n=n))


def cholesky_min_pivot(y_rows):
    """Smallest squared diagonal entry of mpmath's Cholesky factor."""
    l = cholesky(matrix([[mpf(str(x)) for x in row] for row in y_rows]))
    return min(l[i, i] ** 2 for i in range(l.rows))


def cross_ratios(e1, e2, e3):
    es = (Fraction(e1), Fraction(e2), Fraction(e3))
    out = set()
    for i, j, k in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
        out.add((es[i] - es[k]) / (es[j] - es[k]))
    return out
