"""Certified evaluation of Riemann theta functions and their invariant norms.

The series is truncated over the box ||n||_inf <= N; the Gaussian tail over
the complement is bounded in closed form from an exact rational lower bound
on the smallest eigenvalue of Im tau, so the reported error is a proven
bound, not an estimate.  All rounding inside the box sum is accounted for by
an explicit ulp budget at the working precision.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from mpmath import mp, mpf, mpc, fabs, exp, log, pi, sqrt, workprec

from .certified import (CertifiedComplex, CertifiedReal, PrecisionError,
                        Verdict, certified_le)
from .exactla import (det, fraction_to_mpf, inverse, matvec,
                      min_eig_lower_bound, mpf_to_fraction)
from .siegel import SiegelPoint

DEFAULT_PREC = 128
GUARD_BITS = 64
RADIUS_CAP = 4000


class ReduceFirstError(ArithmeticError):
    """Im tau is so skewed that the truncation radius would be astronomical;
    reduce tau before evaluating."""


def default_tol(prec: int) -> mpf:
    # 2^-80 at the default 128 bits
    return mpf(2) ** (-(5 * prec) // 8)


@dataclass(frozen=True)
class ThetaCharacteristic:
    """Pair (m1, m2) of rational vectors with entries in {0, 1/r, ..., (r-1)/r}."""
    r: int
    m1: tuple[Fraction, ...]
    m2: tuple[Fraction, ...]

    def __post_init__(self):
        if self.r < 2 or self.r % 2 != 0:
            raise ValueError("level r must be an even integer >= 2")
        if len(self.m1) != len(self.m2):
            raise ValueError("m1 and m2 must have the same length")
        for v in self.m1 + self.m2:
            if not (0 <= v < 1) or (v * self.r).denominator != 1:
                raise ValueError("entries must lie in {0, 1/r, ..., (r-1)/r}")

    @property
    def g(self) -> int:
        return len(self.m1)

    @classmethod
    def from_integers(cls, r: int, a, b) -> "ThetaCharacteristic":
        return cls(r, tuple(Fraction(x % r, r) for x in a),
                   tuple(Fraction(x % r, r) for x in b))

    def is_odd(self) -> bool:
        """4 m1.m2 an odd integer forces theta_(m1,m2)(tau, 0) = 0."""
        s = 4 * sum(x * y for x, y in zip(self.m1, self.m2))
        return s.denominator == 1 and int(s) % 2 == 1


@dataclass(frozen=True)
class CosetSet:
    """The r^(2g) points (a + tau b)/r representing
    (1/r)(Z^g + tau Z^g)/(Z^g + tau Z^g)."""
    r: int
    tau: SiegelPoint
    representatives: tuple[tuple[mpc, ...], ...]


def coset_set(tau: SiegelPoint, r: int, prec: int = DEFAULT_PREC) -> CosetSet:
    if r < 2 or r % 2 != 0:
        raise ValueError("level r must be an even integer >= 2")
    g = tau.g
    reps = []
    with workprec(prec + GUARD_BITS):
        for a in itertools.product(range(r), repeat=g):
            for b in itertools.product(range(r), repeat=g):
                e = tuple((a[i] + sum(tau.entry(i, j) * b[j] for j in range(g))) / r
                          for i in range(g))
                reps.append(e)
    return CosetSet(r, tau, tuple(reps))


# ---------------------------------------------------------------------------
# the certified series engine


def _normalize_inputs(tau, z, char):
    g = tau.g
    if z is None:
        z = tuple(mpc(0) for _ in range(g))
    else:
        z = tuple(mpc(x) for x in z)
        if len(z) != g:
            raise ValueError("z must have length g")
    if char is None:
        den, a, b = 1, (0,) * g, (0,) * g
    else:
        if char.g != g:
            raise ValueError("characteristic dimension mismatch")
        den = char.r
        a = tuple(int(v * char.r) for v in char.m1)
        b = tuple(int(v * char.r) for v in char.m2)
    return z, den, a, b


def _tail_data(tau: SiegelPoint, z) -> tuple[Fraction, Fraction, Fraction]:
    """(lambda_lb, xi, s): exact smallest-eigenvalue lower bound of Y, the
    exact value y^T Y^-1 y, and ||m1 + Y^-1 y||_inf is completed by caller."""
    y_mat = tau.im_fractions()
    lam = min_eig_lower_bound(y_mat)
    if lam <= 0:
        raise ValueError("Im tau is not positive definite")
    y_vec = tuple(mpf_to_fraction(mpf(w.imag)) for w in z)
    yinv = inverse(y_mat)
    u = matvec(yinv, y_vec)
    xi = sum(a * b for a, b in zip(y_vec, u))
    return lam, xi, u


def _tail_bound(g: int, lam: Fraction, xi: Fraction, s: Fraction, n: int) -> mpf:
    """Proven bound on the absolute tail over ||n||_inf > N.

    Derivation: complete the square in the exponent, bound the quadratic form
    by lam * (k - s)^2 on the shell ||n||_inf = k, count the shell by
    2g(2k+1)^(g-1), and dominate the resulting series by a geometric one.
    Requires N + 1 > s.
    """
    gap = Fraction(n + 1) - s
    if gap <= 0:
        return mpf("inf")
    lam_m = fraction_to_mpf(lam)
    gap_m = fraction_to_mpf(gap)
    q = exp(-2 * pi * lam_m * gap_m)
    if q >= 1:
        return mpf("inf")
    t = (exp(pi * fraction_to_mpf(xi)) * 2 * g * mpf(2 * n + 3) ** (g - 1)
         * factorial(g - 1) * exp(-pi * lam_m * gap_m ** 2) / (1 - q) ** g)
    return t * (1 + mpf(2) ** -30)


def choose_radius(tau: SiegelPoint, z=None, char=None,
                  prec: int = DEFAULT_PREC, tol=None) -> int:
    """Smallest box radius whose certified tail bound is below tol/2."""
    if tol is None:
        tol = default_tol(prec)
    z, den, a, b = _normalize_inputs(tau, z, char)
    g = tau.g
    with workprec(prec + GUARD_BITS):
        lam, xi, u = _tail_data(tau, z)
        m1 = tuple(Fraction(x, den) for x in a)
        s = max(abs(m + w) for m, w in zip(m1, u))
        target = mpf(tol) / 2
        n = int(s) + 1
        # jump close to the solution of lam*(N+1-s)^2 = log(1/target) + xi
        need = (log(1 / target) + pi * fraction_to_mpf(xi) + g * 4 + 8) / (pi * fraction_to_mpf(lam))
        n = max(n, int(s + sqrt(need)) + 1)
        while n <= RADIUS_CAP and _tail_bound(g, lam, xi, s, n) > target:
            n += 1
        if n > RADIUS_CAP:
            raise ReduceFirstError(
                "truncation radius exceeds the cap; reduce tau first")
        while n > int(s) + 2 and _tail_bound(g, lam, xi, s, n - 1) <= target:
            n -= 1
    return n


def _box_sum(tau: SiegelPoint, z, den: int, a, b, radius: int):
    """Deterministic lexicographic sum over the box, with cached integer
    powers of the exponential bases.  Returns (value, sum of |terms|,
    rounding-budget factor in ulps)."""
    g = tau.g
    i_pi = mpc(0, 1) * pi
    bases_q = {}
    max_arg = mpf(0)
    for j in range(g):
        for k in range(j, g):
            arg = i_pi * tau.entry(j, k) * (2 if j != k else 1) / (den * den)
            bases_q[(j, k)] = exp(arg)
            max_arg = max(max_arg, fabs(arg))
    bases_l = []
    for j in range(g):
        arg = 2 * i_pi * (z[j] + mpf(b[j]) / den) / den
        bases_l.append(exp(arg))
        max_arg = max(max_arg, fabs(arg))

    pow_cache: dict[tuple, mpc] = {}

    def cpow(key, base, e):
        k = (key, e)
        v = pow_cache.get(k)
        if v is None:
            v = base ** e
            pow_cache[k] = v
        return v

    total = mpc(0)
    sum_abs = mpf(0)
    n_terms = 0
    max_c = 1
    for n in itertools.product(range(-radius, radius + 1), repeat=g):
        nn = tuple(den * n[j] + a[j] for j in range(g))
        term = mpc(1)
        for j in range(g):
            for k in range(j, g):
                c = nn[j] * nn[k]
                max_c = max(max_c, abs(c))
                term *= cpow((j, k), bases_q[(j, k)], c)
        for j in range(g):
            term *= cpow(("l", j), bases_l[j], nn[j])
        total += term
        sum_abs += fabs(term)
        n_terms += 1
    n_factors = g * (g + 1) // 2 + g
    ulp_budget = (n_factors * (2 * max_c.bit_length() + 8 * (5 + int(max_arg)))
                  + n_terms + 16)
    return total, sum_abs, ulp_budget


def theta_truncated(tau: SiegelPoint, z=None, char=None, radius: int = 10,
                    prec: int = DEFAULT_PREC) -> CertifiedComplex:
    """Theta sum over ||n||_inf <= radius with the certified error bound for
    exactly that truncation (tail at the given radius plus rounding)."""
    z, den, a, b = _normalize_inputs(tau, z, char)
    g = tau.g
    with workprec(prec + GUARD_BITS):
        lam, xi, u = _tail_data(tau, z)
        m1 = tuple(Fraction(x, den) for x in a)
        s = max(abs(m + w) for m, w in zip(m1, u))
        tail = _tail_bound(g, lam, xi, s, radius)
        value, sum_abs, ulps = _box_sum(tau, z, den, a, b, radius)
        err = tail + sum_abs * ulps * mpf(2) ** (1 - mp.prec)
    return CertifiedComplex(value, err)


def theta(tau: SiegelPoint, z=None, char: ThetaCharacteristic | None = None,
          prec: int = DEFAULT_PREC, tol=None) -> CertifiedComplex:
    """theta_(m1,m2)(tau, z) with a proven absolute error bound below tol."""
    radius = choose_radius(tau, z, char, prec, tol)
    return theta_truncated(tau, z, char, radius, prec)


# ---------------------------------------------------------------------------
# invariant norms


def _det_y_root(tau: SiegelPoint, power: Fraction) -> CertifiedReal:
    d = fraction_to_mpf(abs(det(tau.im_fractions())))
    return CertifiedReal.rounded(d ** fraction_to_mpf(power))


def theta_norm(tau: SiegelPoint, z=None, prec: int = DEFAULT_PREC,
               tol=None) -> CertifiedReal:
    """det(Y)^(1/4) exp(-pi y^T Y^-1 y) |theta(tau, z)|."""
    zt, _, _, _ = _normalize_inputs(tau, z, None)
    with workprec(prec + GUARD_BITS):
        _, xi, _ = _tail_data(tau, zt)
        th = theta(tau, zt, None, prec, tol).abs()
        root = _det_y_root(tau, Fraction(1, 4))
        gauss = CertifiedReal.rounded(-pi * fraction_to_mpf(xi)).exp()
        return root * gauss * th


def theta_norm_char(tau: SiegelPoint, char: ThetaCharacteristic,
                    prec: int = DEFAULT_PREC, tol=None) -> CertifiedReal:
    """det(Y)^(1/4) |theta_(m1,m2)(tau, 0)|; the norm is only needed at z = 0."""
    with workprec(prec + GUARD_BITS):
        th = theta(tau, None, char, prec, tol).abs()
        return _det_y_root(tau, Fraction(1, 4)) * th


def theta_null_vector(tau: SiegelPoint, r: int,
                      prec: int = DEFAULT_PREC, tol=None) -> list[CertifiedComplex]:
    """All r^(2g) theta constants, (m1, m2) in lexicographic order."""
    if r < 2 or r % 2 != 0:
        raise ValueError("level r must be an even integer >= 2")
    g = tau.g
    out = []
    for a in itertools.product(range(r), repeat=g):
        for b in itertools.product(range(r), repeat=g):
            ch = ThetaCharacteristic.from_integers(r, a, b)
            out.append(theta(tau, None, ch, prec, tol))
    if not any(fabs(v.value) > v.err for v in out):
        raise PrecisionError("all theta constants drowned in the error bound; "
                             "this signals a precision failure")
    return out


def beta_sigma(tau: SiegelPoint, z, r: int, prec: int = DEFAULT_PREC,
               tol=None) -> CertifiedReal:
    """-(1/2) log(2^(g/2) sum over the coset set of ||theta||^2(tau, rz+e))."""
    g = tau.g
    zt, _, _, _ = _normalize_inputs(tau, z, None)
    with workprec(prec + GUARD_BITS):
        cs = coset_set(tau, r, prec)
        total = CertifiedReal.exact(0)
        for e in cs.representatives:
            w = tuple(r * zt[i] + e[i] for i in range(g))
            nv = theta_norm(tau, w, prec, tol)
            total = total + nv * nv
        if total.lo <= 0:
            raise PrecisionError("coset norm sum is below its error bound")
        two_pow = CertifiedReal.rounded(mpf(2) ** (mpf(g) / 2))
        return (two_pow * total).log() * CertifiedReal.exact(mpf(-1) / 2)


# ---------------------------------------------------------------------------
# verification operations


@dataclass(frozen=True)
class NormBoundsReport:
    """Certified check of the two-sided invariant-norm bounds.

    ``max_lower``: max_e ||theta||^2(tau, e) >= det(Im tau)^(1/2), valid on
    the whole Siegel space.  ``upper`` and the combined window additionally
    assume tau was reduced (caller's responsibility, flag echoed here).
    """
    g: int
    r: int
    assumed_reduced: bool
    max_lower: Verdict
    upper: Verdict | None
    combined_lower: Verdict | None
    combined_upper: Verdict | None


def _interval(lo: mpf, hi: mpf) -> CertifiedReal:
    mid = (lo + hi) / 2
    return CertifiedReal(mid, (hi - lo) / 2 + fabs(mid) * mpf(2) ** (4 - mp.prec))


def verify_norm_bounds(tau: SiegelPoint, r: int, z=None,
                       prec: int = DEFAULT_PREC, tol=None,
                       assume_reduced: bool = False) -> NormBoundsReport:
    from . import constants
    g = tau.g
    with workprec(prec + GUARD_BITS):
        cs = coset_set(tau, r, prec)
        norms2 = []
        for e in cs.representatives:
            nv = theta_norm(tau, e, prec, tol)
            norms2.append(nv * nv)
        lhs = _interval(max(v.lo for v in norms2), max(v.hi for v in norms2))
        det_root = _det_y_root(tau, Fraction(1, 2))
        max_lower = certified_le(det_root, lhs)

        upper = combined_lower = combined_upper = None
        if assume_reduced:
            c_g = constants.c_g(g, prec)
            nz = theta_norm(tau, z, prec, tol)
            upper = certified_le(nz * nz, c_g * det_root)
            total = norms2[0]
            for v in norms2[1:]:
                total = total + v
            two_pow = CertifiedReal.rounded(mpf(2) ** (mpf(g) / 2))
            mid = ((two_pow * total).log() * CertifiedReal.exact(mpf(1) / 2)
                   - det_root.log() * CertifiedReal.exact(mpf(1) / 2))
            lo_const = CertifiedReal.rounded(g * log(2) / 4)
            hi_const = (c_g.log() * CertifiedReal.exact(mpf(1) / 2)
                        + lo_const + CertifiedReal.rounded(g * log(r)))
            combined_lower = certified_le(lo_const, mid)
            combined_upper = certified_le(mid, hi_const)
    return NormBoundsReport(g, r, assume_reduced, max_lower, upper,
                            combined_lower, combined_upper)


@dataclass(frozen=True)
class DuplicationReport:
    """F(2^k tau) = max over half-integer characteristics of
    |theta_(m1,m2)(2^k tau, 0)|, its certified monotonicity down the
    duplication tower, and the drift of theta(2^k tau, 0) toward 1."""
    f_values: tuple[CertifiedReal, ...]
    theta00_gap: tuple[mpf, ...]
    monotone: tuple[Verdict, ...]


def verify_duplication(tau: SiegelPoint, steps: int,
                       prec: int = DEFAULT_PREC, tol=None) -> DuplicationReport:
    g = tau.g
    f_vals = []
    gaps = []
    with workprec(prec + GUARD_BITS):
        for k in range(steps + 1):
            scale = 2 ** k
            scaled = SiegelPoint.from_rows(
                [[tau.entry(i, j) * scale for j in range(g)] for i in range(g)])
            vals = []
            for a in itertools.product((0, 1), repeat=g):
                for b in itertools.product((0, 1), repeat=g):
                    ch = ThetaCharacteristic.from_integers(2, a, b)
                    vals.append(theta(scaled, None, ch, prec, tol).abs())
            f_vals.append(_interval(max(v.lo for v in vals),
                                    max(v.hi for v in vals)))
            th0 = theta(scaled, None, None, prec, tol)
            gaps.append(fabs(th0.value - 1) + th0.err)
        mono = tuple(certified_le(f_vals[k + 1], f_vals[k]) for k in range(steps))
    return DuplicationReport(tuple(f_vals), tuple(gaps), mono)
