"""Full-rank lattices in Q^n over Z, and the index-based distance on them.

Everything is exact integer/rational arithmetic; no floating point enters
any index computation.  Lattices are stored in a canonical column-style
Hermite normal form (lower triangular, positive pivots, entries left of each
pivot reduced modulo it) over a minimal global denominator, so equal
lattices have identical representations and the metric axioms can be tested
as identities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exactla import Mat, inverse as frac_inverse, transpose

IntRows = tuple[tuple[int, ...], ...]


class LatticeError(ValueError):
    pass


class InvariantBreach(RuntimeError):
    """An internal cross-check (determinant ratio vs SNF divisors) failed."""


# ---------------------------------------------------------------------------
# integer normal forms


def hnf_columns(rows: list[list[int]]) -> list[list[int]]:
    """Column-style HNF of an n x m integer matrix of full row rank n.

    Returns the n x n lower-triangular canonical basis (as rows): positive
    pivots on the diagonal, zeros to the right, and 0 <= H[i][j] < H[i][i]
    for j < i.
    """
    n = len(rows)
    m = len(rows[0]) if n else 0
    a = [list(r) for r in rows]

    def swap_cols(j, k):
        for r in a:
            r[j], r[k] = r[k], r[j]

    def addmul_col(j, k, q):
        # col_j += q * col_k
        for r in a:
            r[j] += q * r[k]

    def neg_col(j):
        for r in a:
            r[j] = -r[j]

    for i in range(n):
        # gcd-eliminate row i over columns >= i, leaving one nonzero at col i
        while True:
            nz = [j for j in range(i, m) if a[i][j] != 0]
            if not nz:
                raise LatticeError("matrix does not have full row rank")
            jmin = min(nz, key=lambda j: abs(a[i][j]))
            if jmin != i:
                swap_cols(i, jmin)
            done = True
            for j in range(i + 1, m):
                if a[i][j] != 0:
                    q = a[i][j] // a[i][i]
                    addmul_col(j, i, -q)
                    if a[i][j] != 0:
                        done = False
            if done:
                break
        if a[i][i] < 0:
            neg_col(i)
        for j in range(i):
            q = a[i][j] // a[i][i]
            if q:
                addmul_col(j, i, -q)
    for i in range(n):
        for j in range(n, m):
            if a[i][j] != 0:
                raise InvariantBreach("nonzero residue column after HNF")
    return [r[:n] for r in a]


def snf_divisors(rows) -> list[int]:
    """Elementary divisors d1 | d2 | ... of a nonsingular integer matrix."""
    a = [list(r) for r in rows]
    n = len(a)
    m = len(a[0])
    k = min(n, m)
    for t in range(k):
        while True:
            # smallest nonzero entry of the trailing block to the pivot slot
            best = None
            for i in range(t, n):
                for j in range(t, m):
                    if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                raise LatticeError("singular matrix in SNF")
            bi, bj = best
            if bi != t:
                a[t], a[bi] = a[bi], a[t]
            if bj != t:
                for r in a:
                    r[t], r[bj] = r[bj], r[t]
            p = a[t][t]
            clean = True
            for i in range(t + 1, n):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t] != 0:
                    clean = False
            for j in range(t + 1, m):
                q = a[t][j] // p
                if q:
                    for r in a:
                        r[j] -= q * r[t]
                if a[t][j] != 0:
                    clean = False
            if not clean:
                continue
            # divisibility fix-up
            bad = None
            for i in range(t + 1, n):
                for j in range(t + 1, m):
                    if a[i][j] % p != 0:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad])]
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
    return [a[t][t] for t in range(k)]


# ---------------------------------------------------------------------------
# the lattice type


@dataclass(frozen=True)
class IntegerLattice:
    """Full-rank lattice in Q^n: columns of num/den generate it; (num, den)
    is the canonical HNF-with-minimal-denominator form."""
    n: int
    num: IntRows
    den: int

    @classmethod
    def from_rows(cls, rows) -> "IntegerLattice":
        """Rows of a (possibly rational, possibly rectangular n x m) matrix
        whose columns generate the lattice."""
        rr = [[Fraction(x) for x in row] for row in rows]
        n = len(rr)
        if n == 0 or any(len(r) == 0 for r in rr):
            raise LatticeError("empty basis")
        den = 1
        for row in rr:
            for x in row:
                den = den * x.denominator // math.gcd(den, x.denominator)
        ints = [[int(x * den) for x in row] for row in rr]
        h = hnf_columns(ints)
        content = den
        for row in h:
            for x in row:
                content = math.gcd(content, abs(x))
        if content > 1:
            h = [[x // content for x in row] for row in h]
            den //= content
        return cls(n, tuple(tuple(r) for r in h), den)

    def basis_fractions(self) -> Mat:
        return tuple(tuple(Fraction(x, self.den) for x in row) for row in self.num)

    def det(self) -> Fraction:
        d = Fraction(1)
        for i in range(self.n):
            d *= self.num[i][i]
        return d / Fraction(self.den) ** self.n

    def contains(self, vec) -> bool:
        """Exact membership: basis^-1 vec integral (forward substitution on
        the lower-triangular HNF)."""
        v = [Fraction(x) * self.den for x in vec]
        x = [Fraction(0)] * self.n
        for i in range(self.n):
            s = v[i] - sum(self.num[i][j] * x[j] for j in range(i))
            xi = s / self.num[i][i]
            x[i] = xi
        return all(q.denominator == 1 for q in x)

    def contains_lattice(self, other: "IntegerLattice") -> bool:
        cols = list(zip(*other.basis_fractions()))
        return all(self.contains(c) for c in cols)

    def scaled(self, k: int) -> "IntegerLattice":
        if k <= 0:
            raise LatticeError("scale factor must be a positive integer")
        return IntegerLattice.from_rows(
            [[Fraction(x * k, self.den) for x in row] for row in self.num])

    def transformed(self, u: IntRows) -> "IntegerLattice":
        """Image under an ambient unimodular change of basis."""
        b = self.basis_fractions()
        rows = [[sum(Fraction(u[i][k]) * b[k][j] for k in range(self.n))
                 for j in range(self.n)] for i in range(self.n)]
        return IntegerLattice.from_rows(rows)


def hnf(rows) -> IntegerLattice:
    """Canonical form of a basis given by rows (columns generate)."""
    return IntegerLattice.from_rows(rows)


def lattice_sum(l1: IntegerLattice, l2: IntegerLattice) -> IntegerLattice:
    if l1.n != l2.n:
        raise LatticeError("ambient dimension mismatch")
    d = l1.den * l2.den // math.gcd(l1.den, l2.den)
    f1 = d // l1.den
    f2 = d // l2.den
    rows = [[x * f1 for x in r1] + [x * f2 for x in r2]
            for r1, r2 in zip(l1.num, l2.num)]
    return IntegerLattice.from_rows(
        [[Fraction(x, d) for x in row] for row in rows])


def dual(l: IntegerLattice) -> IntegerLattice:
    return IntegerLattice.from_rows(transpose(frac_inverse(l.basis_fractions())))


def intersect(l1: IntegerLattice, l2: IntegerLattice) -> IntegerLattice:
    """Exact intersection via duality: (L1* + L2*)* for full-rank lattices."""
    if l1.n != l2.n:
        raise LatticeError("ambient dimension mismatch")
    inter = dual(lattice_sum(dual(l1), dual(l2)))
    if not (l1.contains_lattice(inter) and l2.contains_lattice(inter)):
        raise InvariantBreach("intersection is not contained in both lattices")
    return inter


def quotient_card(l_sub: IntegerLattice, l_sup: IntegerLattice) -> int:
    """Index [L_sup : L_sub], computed as a determinant ratio and
    cross-checked against the product of SNF elementary divisors of the
    transition matrix on every call."""
    if not l_sup.contains_lattice(l_sub):
        raise LatticeError("first argument is not a sublattice of the second")
    ratio = abs(l_sub.det() / l_sup.det())
    if ratio.denominator != 1:
        raise InvariantBreach("sublattice index is not an integer")
    index = int(ratio)
    trans = _transition_matrix(l_sup, l_sub)
    divisors = snf_divisors(trans)
    prod = 1
    for d in divisors:
        prod *= d
    if prod != index:
        raise InvariantBreach(
            f"determinant-ratio index {index} disagrees with SNF product {prod}")
    return index


def _transition_matrix(l_sup: IntegerLattice, l_sub: IntegerLattice) -> list[list[int]]:
    t = frac_inverse(l_sup.basis_fractions())
    b = l_sub.basis_fractions()
    n = l_sup.n
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            q = sum(t[i][k] * b[k][j] for k in range(n))
            if q.denominator != 1:
                raise InvariantBreach("transition matrix is not integral")
            row.append(int(q))
        out.append(row)
    return out


def delta_exact(l1: IntegerLattice, l2: IntegerLattice):
    """(sum, intersection, exact index of the intersection in the sum)."""
    s = lattice_sum(l1, l2)
    i = intersect(l1, l2)
    return s, i, quotient_card(i, s)


def delta(l1: IntegerLattice, l2: IntegerLattice) -> float:
    """log Card((L1 + L2)/(L1 cap L2)); the degree prefactor is 1 over Q."""
    _, _, index = delta_exact(l1, l2)
    return math.log(index)


@dataclass(frozen=True)
class ScalingInvarianceReport:
    index_before: int
    index_unimodular: int
    index_scaled: int

    @property
    def ok(self) -> bool:
        return self.index_before == self.index_unimodular == self.index_scaled


def scaling_invariance_check(l1: IntegerLattice, l2: IntegerLattice, k: int,
                             u: IntRows | None = None) -> ScalingInvarianceReport:
    """delta is unchanged by a simultaneous unimodular ambient change of
    basis and by simultaneous scaling, exactly."""
    _, _, before = delta_exact(l1, l2)
    if u is None:
        u = tuple(tuple(1 if i == j else 0 for j in range(l1.n)) for i in range(l1.n))
    _, _, after_u = delta_exact(l1.transformed(u), l2.transformed(u))
    _, _, after_k = delta_exact(l1.scaled(k), l2.scaled(k))
    return ScalingInvarianceReport(before, after_u, after_k)
