"""Seeded splittable sampling for the verification campaigns.

Every sample gets its own substream derived by hashing (seed, sample_id), so
results are independent of scheduling and worker count.  Raw randomness is
drawn at double precision and converted to exact dyadic mpf values; the
certified arithmetic downstream does not care where the points came from.
"""
from __future__ import annotations

import hashlib
import math
import random
from fractions import Fraction

from mpmath import mpf, mpc, workprec

from .lattices import IntegerLattice
from .siegel import SiegelPoint
from .theta import ThetaCharacteristic


def substream(seed: int, sample_id: str) -> random.Random:
    h = hashlib.sha256(f"{seed}:{sample_id}".encode()).digest()
    return random.Random(int.from_bytes(h[:16], "big"))


def random_siegel_point(rng: random.Random, g: int) -> SiegelPoint:
    """Re entries uniform in [-1/2, 1/2]; Im = Q^T diag(d) Q with d
    log-uniform in [0.5, 4] and Q a product of random Givens rotations."""
    re = [[0.0] * g for _ in range(g)]
    for i in range(g):
        for j in range(i, g):
            re[i][j] = re[j][i] = rng.uniform(-0.5, 0.5)
    d = [0.5 * math.exp(rng.random() * math.log(8.0)) for _ in range(g)]
    q = [[1.0 if i == j else 0.0 for j in range(g)] for i in range(g)]
    for i in range(g):
        for j in range(i + 1, g):
            phi = rng.uniform(0.0, 2 * math.pi)
            c, s = math.cos(phi), math.sin(phi)
            for k in range(g):
                q[i][k], q[j][k] = c * q[i][k] + s * q[j][k], -s * q[i][k] + c * q[j][k]
    im = [[sum(q[k][i] * d[k] * q[k][j] for k in range(g)) for j in range(g)]
          for i in range(g)]
    rows = []
    for i in range(g):
        row = []
        for j in range(g):
            sym = 0.5 * (im[i][j] + im[j][i]) if i != j else im[i][j]
            row.append(mpc(mpf(re[i][j]), mpf(sym)))
        rows.append(row)
    return SiegelPoint.from_rows(rows)


def random_z(rng: random.Random, tau: SiegelPoint, prec: int = 128):
    """z = a + tau b with a, b uniform in [0, 1)^g covers a fundamental cell
    of the period lattice."""
    g = tau.g
    a = [rng.random() for _ in range(g)]
    b = [rng.random() for _ in range(g)]
    with workprec(prec + 32):
        return tuple(mpf(a[i]) + sum(tau.entry(i, j) * mpf(b[j]) for j in range(g))
                     for i in range(g))


def random_char(rng: random.Random, g: int, r: int) -> ThetaCharacteristic:
    return ThetaCharacteristic.from_integers(
        r, [rng.randrange(r) for _ in range(g)], [rng.randrange(r) for _ in range(g)])


def random_lattice(rng: random.Random, n: int, bound: int = 10) -> IntegerLattice:
    while True:
        rows = [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(n)]
        try:
            return IntegerLattice.from_rows(rows)
        except ValueError:
            continue


def random_unimodular(rng: random.Random, n: int, steps: int = 12):
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i = rng.randrange(n)
        j = rng.randrange(n)
        if i == j:
            continue
        c = rng.choice((-1, 1))
        for k in range(n):
            u[i][k] += c * u[j][k]
    return tuple(tuple(row) for row in u)


def random_tilde_lemma_instance(rng: random.Random):
    """Rejection-sampled (a, b, c) with a, b >= 1, c >= 2 and
    |a - b| <= c log(2 + a).  Returned as exact dyadic Fractions."""
    while True:
        scale = rng.choice((10.0, 100.0, 10000.0, 1e8))
        a = 1.0 + rng.random() * scale
        b = 1.0 + rng.random() * scale
        c = 2.0 + rng.random() * 48.0
        if abs(a - b) <= c * math.log(2 + a):
            return Fraction(a), Fraction(b), Fraction(c)


def random_min_lemma_instance(rng: random.Random):
    """Rejection-sampled (a, b, c, d) with a, b >= 1, c > 0, d <= a and
    |a - b| <= c log(2 + min(a, b))."""
    while True:
        scale = rng.choice((10.0, 100.0, 10000.0, 1e8))
        a = 1.0 + rng.random() * scale
        b = 1.0 + rng.random() * scale
        c = 0.05 + rng.random() * 50.0
        if abs(a - b) <= c * math.log(2 + min(a, b)):
            d = a - rng.random() * scale
            return Fraction(a), Fraction(b), Fraction(c), Fraction(d)
