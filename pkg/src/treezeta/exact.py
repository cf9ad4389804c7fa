"""Exact linear algebra over the rationals, plus fast modular rank certificates.

Matrices are lists of lists of ints or Fractions.  Everything here is
deterministic; no floating point.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

# Two independent primes for modular rank lower bounds.  Products p*p*rowlen
# stay far below 2**63 for the matrix sizes used here.
_RANK_PRIMES = (46337, 46327)


def clear_denominators(rows):
    """Scale each row of a rational matrix to integers (row-wise lcm)."""
    out = []
    for row in rows:
        denial = 1
        for x in row:
            if isinstance(x, Fraction):
                denial = denial * x.denominator // _gcd(denial, x.denominator)
        out.append([int(x * denial) if isinstance(x, Fraction) else x * denial for x in row])
    return out


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def rank_mod(rows, p):
    """Rank of an integer matrix over F_p (Gaussian elimination, numpy int64)."""
    if not rows or not rows[0]:
        return 0
    m = np.array(rows, dtype=np.int64) % p
    nr, nc = m.shape
    rank = 0
    row = 0
    for col in range(nc):
        piv = None
        for r in range(row, nr):
            if m[r, col] % p:
                piv = r
                break
        if piv is None:
            continue
        m[[row, piv]] = m[[piv, row]]
        inv = pow(int(m[row, col]), p - 2, p)
        m[row] = (m[row] * inv) % p
        for r in range(nr):
            if r != row and m[r, col]:
                m[r] = (m[r] - m[r, col] * m[row]) % p
        row += 1
        rank += 1
        if row == nr:
            break
    return rank


def rank_lower_bound(rows):
    """max over two primes of the F_p rank; always <= the rational rank."""
    rows = clear_denominators(rows)
    return max(rank_mod(rows, p) for p in _RANK_PRIMES)


def rref(rows):
    """Reduced row echelon form over Q.  Returns (rref rows, pivot columns)."""
    m = [[Fraction(x) for x in row] for row in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    pivots = []
    row = 0
    for col in range(nc):
        piv = None
        for r in range(row, nr):
            if m[r][col]:
                piv = r
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = 1 / m[row][col]
        m[row] = [x * inv for x in m[row]]
        for r in range(nr):
            if r != row and m[r][col]:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[row])]
        pivots.append(col)
        row += 1
        if row == nr:
            break
    return m, pivots


def rank(rows):
    if not rows or not rows[0]:
        return 0
    return len(rref(rows)[1])


def nullspace(rows):
    """Basis of the right kernel of a rational matrix (list of Fraction vectors)."""
    if not rows:
        return []
    nc = len(rows[0])
    red, pivots = rref(rows)
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * nc
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -red[r][fc]
        basis.append(vec)
    return basis


def solve(a_rows, b):
    """Solve A x = b exactly; returns None if inconsistent.

    A square or tall, full column rank expected for a unique solution.
    """
    nr = len(a_rows)
    nc = len(a_rows[0]) if nr else 0
    aug = [[Fraction(x) for x in row] + [Fraction(b[i])] for i, row in enumerate(a_rows)]
    red, pivots = rref(aug)
    if nc in pivots:
        return None
    x = [Fraction(0)] * nc
    for r, pc in enumerate(pivots):
        x[pc] = red[r][nc]
    return x


def mat_mul(a, b):
    nr = len(a)
    ni = len(b)
    nc = len(b[0]) if ni else 0
    out = [[Fraction(0)] * nc for _ in range(nr)]
    for i in range(nr):
        ai = a[i]
        oi = out[i]
        for k in range(ni):
            f = ai[k]
            if not f:
                continue
            bk = b[k]
            for j in range(nc):
                if bk[j]:
                    oi[j] += f * bk[j]
    return out


def mat_vec(a, v):
    return [sum(r[j] * v[j] for j in range(len(v)) if v[j]) for r in a]


def transpose(a):
    return [list(col) for col in zip(*a)] if a else []


def eye(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def is_zero_matrix(a):
    return all(not x for row in a for x in row)


def project_onto_span(basis_vectors, vectors, weights=None):
    """Orthogonal projection of each of `vectors` onto span(basis_vectors).

    Exact rationals via normal equations.  `weights` is an optional diagonal
    inner-product weight vector (defaults to Euclidean).  Returns the list of
    projections; redundant (dependent) basis vectors are allowed.
    """
    if not basis_vectors:
        return [[Fraction(0)] * len(v) for v in vectors]
    dim = len(basis_vectors[0])
    w = weights if weights is not None else [Fraction(1)] * dim
    # Restrict to an independent subset of the basis for a unique solve.
    indep = _independent_rows(basis_vectors)
    bv = [basis_vectors[i] for i in indep]
    g = [[sum(w[k] * bi[k] * bj[k] for k in range(dim) if bi[k] and bj[k])
          for bj in bv] for bi in bv]
    outs = []
    for v in vectors:
        rhs = [sum(w[k] * b[k] * v[k] for k in range(dim) if b[k] and v[k]) for b in bv]
        coeffs = solve(g, rhs)
        proj = [Fraction(0)] * dim
        for c, b in zip(coeffs, bv):
            if c:
                for k in range(dim):
                    if b[k]:
                        proj[k] += c * b[k]
        outs.append(proj)
    return outs


def _independent_rows(rows):
    """Indices of a maximal independent subset of rows (first-come pivoting)."""
    m = [[Fraction(x) for x in row] for row in rows]
    order = list(range(len(m)))
    nr = len(m)
    nc = len(m[0]) if nr else 0
    chosen = []
    row = 0
    for col in range(nc):
        piv = None
        for r in range(row, nr):
            if m[r][col]:
                piv = r
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        order[row], order[piv] = order[piv], order[row]
        chosen.append(order[row])
        inv = 1 / m[row][col]
        m[row] = [x * inv for x in m[row]]
        for r in range(row + 1, nr):
            if m[r][col]:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[row])]
        row += 1
        if row == nr:
            break
    return sorted(chosen)


def projection_matrix(basis_vectors, dim):
    """Euclidean orthogonal projection matrix onto a span (exact rationals)."""
    vecs = [v for v in basis_vectors if any(v)]
    if not vecs:
        return [[Fraction(0)] * dim for _ in range(dim)]
    idx = _independent_rows(vecs)
    b = [vecs[i] for i in idx]
    g = [[sum(bi[k] * bj[k] for k in range(dim)) for bj in b] for bi in b]
    ginv_bt = []
    for i in range(len(b)):
        rhs = [Fraction(int(i == j)) for j in range(len(b))]
        ginv_bt.append(solve(g, rhs))
    # P = B^T G^-1 B with B rows = basis
    out = [[Fraction(0)] * dim for _ in range(dim)]
    for r in range(len(b)):
        for s in range(len(b)):
            c = ginv_bt[r][s]
            if not c:
                continue
            br, bs = b[r], b[s]
            for i in range(dim):
                if br[i]:
                    x = c * br[i]
                    for j in range(dim):
                        if bs[j]:
                            out[i][j] += x * bs[j]
    return out


class SpanProjector:
    """Cached exact orthogonal projector onto the span of integer vectors.

    A modular-rank fast path picks a candidate independent subset; the
    choice is verified exactly (every dropped vector must project to
    itself), falling back to exact elimination if not.  The Gram matrix of
    small integer vectors is computed in int64 and inverted once over Q.
    """

    def __init__(self, basis_vectors):
        vecs = [[int(x) for x in v] for v in basis_vectors if any(v)]
        self.dim = len(basis_vectors[0]) if basis_vectors else 0
        if not vecs:
            self.b = []
            self.ginv = []
            return
        idx = self._candidate_independent(vecs)
        b = [vecs[i] for i in idx]
        ok = self._setup(b)
        if ok:
            dropped = [vecs[i] for i in range(len(vecs)) if i not in set(idx)]
            for d in dropped:
                pd = self.project([Fraction(x) for x in d])
                if any(pd[k] != d[k] for k in range(self.dim)):
                    ok = False
                    break
        if not ok:
            idx = _independent_rows(vecs)
            b = [vecs[i] for i in idx]
            if not self._setup(b):
                raise ValueError("span projector: exact independent subset failed")

    @staticmethod
    def _candidate_independent(vecs):
        p = _RANK_PRIMES[0]
        m = np.array(vecs, dtype=np.int64) % p
        nr, nc = m.shape
        chosen = []
        order = list(range(nr))
        row = 0
        for col in range(nc):
            piv = None
            for r in range(row, nr):
                if m[r, col] % p:
                    piv = r
                    break
            if piv is None:
                continue
            m[[row, piv]] = m[[piv, row]]
            order[row], order[piv] = order[piv], order[row]
            chosen.append(order[row])
            inv = pow(int(m[row, col]), p - 2, p)
            m[row] = (m[row] * inv) % p
            for r in range(row + 1, nr):
                if m[r, col]:
                    m[r] = (m[r] - m[r, col] * m[row]) % p
            row += 1
            if row == nr:
                break
        return sorted(chosen)

    def _setup(self, b):
        self.b = b
        if not b:
            self.ginv = []
            return True
        bm = np.array(b, dtype=np.int64)
        if bm.size and np.abs(bm).max() ** 2 * bm.shape[1] >= 2 ** 62:
            g = [[sum(x * y for x, y in zip(r1, r2)) for r2 in b] for r1 in b]
        else:
            g = (bm @ bm.T).tolist()
        inv = _invert_rational([[Fraction(x) for x in row] for row in g])
        if inv is None:
            return False
        self.ginv = inv
        return True

    def project(self, v):
        if not self.b:
            return [Fraction(0)] * self.dim
        rhs = [sum(Fraction(bi[k]) * v[k] for k in range(self.dim) if bi[k] and v[k])
               for bi in self.b]
        coeffs = [sum(self.ginv[i][j] * rhs[j] for j in range(len(rhs)) if rhs[j])
                  for i in range(len(self.b))]
        out = [Fraction(0)] * self.dim
        for c, bi in zip(coeffs, self.b):
            if c:
                for k in range(self.dim):
                    if bi[k]:
                        out[k] += c * bi[k]
        return out

    @property
    def rank(self):
        return len(self.b)


def _invert_rational(g):
    n = len(g)
    aug = [list(g[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        return None
    return [row[n:] for row in red]
