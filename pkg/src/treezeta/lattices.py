"""Rank-2 lattice classes: vertices of the Bruhat-Tits tree of PGL(2, Q_p).

All arithmetic is exact over the rationals; distances and equivalences are
valuation statements, so there is no floating point anywhere in here.  A
class is stored by the canonical column-reduced representative
[[p^a, b], [0, 1]] (scaled), with equality always cross-checkable against
the valuation criterion.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from treezeta.graphs import DirectedGraph, GraphError
from treezeta.padic import PadicContext, valuation, INFINITY


class LatticeError(ValueError):
    pass


def mat_mul2(a, b):
    return ((a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
            (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]))


def mat_inv2(a):
    det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    if det == 0:
        raise LatticeError("singular matrix")
    return ((a[1][1] / det, -a[0][1] / det), (-a[1][0] / det, a[0][0] / det))


def det2(a):
    return a[0][0] * a[1][1] - a[0][1] * a[1][0]


def _frac_mat(m):
    return tuple(tuple(Fraction(x) for x in row) for row in m)


def _min_valuation(m, p):
    return min(valuation(x, p) for row in m for x in row)


def _mod_ppower(x, p, a):
    """Representative of x mod p^a O: the p-adic digits of x below exponent a,
    as a rational with the smallest nonnegative p-power denominator."""
    x = Fraction(x)
    if x == 0:
        return Fraction(0)
    v = valuation(x, p)
    if v >= a:
        return Fraction(0)
    den = x.denominator
    e = 0
    while den % p == 0:
        den //= p
        e += 1
    mod = p ** (a + e)
    r = (x.numerator * pow(den, -1, mod)) % mod
    return Fraction(r, p ** e)


@dataclass(frozen=True)
class LatticeClass:
    """Homothety class of a rank-2 lattice, canonical triangular form."""

    p: int
    a: int            # diagonal valuation: canonical matrix [[p^a, b], [0, 1]]
    b: Fraction       # reduced mod p^a

    @staticmethod
    def from_matrix(m, p):
        """Canonicalize an invertible rational 2x2 matrix of column generators."""
        m = _frac_mat(m)
        if det2(m) == 0:
            raise LatticeError("lattice representative is singular")
        c0 = [m[0][0], m[1][0]]
        c1 = [m[0][1], m[1][1]]
        # pivot: bottom-row entry of minimal valuation goes to column 2
        v0, v1 = valuation(c0[1], p), valuation(c1[1], p)
        if v0 < v1:
            c0, c1 = c1, c0
            v0, v1 = v1, v0
        if v1 == INFINITY:
            raise LatticeError("degenerate representative")
        # scaling the whole matrix by 1/pivot is a class operation
        u = c1[1]
        c0 = [x / u for x in c0]
        c1 = [x / u for x in c1]
        # clear the bottom of column 1 (coefficient t has valuation >= 0)
        t = c0[1]
        c0 = [c0[0] - t * c1[0], Fraction(0)]
        x = c0[0]
        if x == 0:
            raise LatticeError("degenerate representative")
        a = int(valuation(x, p))
        b = _mod_ppower(c1[0], p, a)
        return LatticeClass(p, a, b)

    def matrix(self):
        return ((Fraction(self.p) ** self.a, self.b), (Fraction(0), Fraction(1)))

    def key(self):
        return (self.a, self.b)

    def __repr__(self):
        return f"LatticeClass(p={self.p}, [[{self.p}^{self.a}, {self.b}], [0, 1]])"


def lattice_distance(x, y):
    """Tree distance |l - k| of elementary-divisor valuations.

    Computed as v(det B) - 2 min-entry-valuation of B = rep(x)^-1 rep(y).
    """
    if x.p != y.p:
        raise LatticeError("classes over different primes")
    b = mat_mul2(mat_inv2(x.matrix()), y.matrix())
    p = x.p
    return int(valuation(det2(b), p) - 2 * _min_valuation(b, p))


def classes_equal(x, y):
    """Valuation criterion: distance zero.  Cross-checks the canonical key."""
    same_key = x.key() == y.key()
    same_val = lattice_distance(x, y) == 0
    if same_key != same_val:
        raise LatticeError(f"canonical form disagrees with valuation test: {x} vs {y}")
    return same_val


def base_class(ctx):
    return LatticeClass.from_matrix(((1, 0), (0, 1)), ctx.p)


def act_on_vertex(m, v):
    """Class of m . rep(v) for an invertible rational matrix m."""
    m = _frac_mat(m)
    if det2(m) == 0:
        raise LatticeError("singular matrix cannot act")
    return LatticeClass.from_matrix(mat_mul2(m, v.matrix()), v.p)


def vertex_neighbors(v, ctx):
    """The q+1 classes at distance 1 (explicit arithmetic needs f = 1).

    Sublattices <p e1, e2 + k e1> for k = 0..p-1 plus <e1, p e2>, in the
    basis of the canonical representative.
    """
    if ctx.f != 1:
        raise LatticeError("explicit neighbor arithmetic requires residue degree 1; "
                           "unramified extensions are handled combinatorially")
    p = ctx.p
    rep = v.matrix()
    out = []
    for k in range(p):
        out.append(LatticeClass.from_matrix(
            mat_mul2(rep, ((p, k), (0, 1))), p))
    out.append(LatticeClass.from_matrix(mat_mul2(rep, ((1, 0), (0, p))), p))
    return out


def primitive_pair(z):
    """Normalize a projective point [a : b] to a primitive integer pair."""
    a, b = Fraction(z[0]), Fraction(z[1])
    if a == 0 and b == 0:
        raise LatticeError("[0 : 0] is not a projective point")
    den = a.denominator * b.denominator // _gcd(a.denominator, b.denominator)
    ai, bi = int(a * den), int(b * den)
    g = _gcd(abs(ai), abs(bi))
    return ai // g, bi // g


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a if a else 1


def half_line_of_point(z, depth, ctx):
    """First vertices of the half-line from the base class toward z = [a : b].

    Classes of the bases {v1, p^n v2} with v1 = (a, b) primitive and v2 a
    deterministic unimodular complement; consecutive distances are all 1.
    """
    a, b = primitive_pair(z)
    p = ctx.p
    v2 = (0, 1) if valuation(a, p) == 0 else (1, 0)
    out = []
    for n in range(depth + 1):
        m = ((Fraction(a), Fraction(v2[0]) * p ** n), (Fraction(b), Fraction(v2[1]) * p ** n))
        out.append(LatticeClass.from_matrix(m, p))
    return out


def geodesic_between_points(z0, z1, ctx, lo, hi):
    """Vertices [v0 | p^t v1], t = lo..hi, along the axis joining two ends."""
    a = primitive_pair(z0)
    b = primitive_pair(z1)
    p = ctx.p
    out = []
    for t in range(lo, hi + 1):
        if t >= 0:
            m = ((Fraction(a[0]), Fraction(b[0]) * p ** t),
                 (Fraction(a[1]), Fraction(b[1]) * p ** t))
        else:
            m = ((Fraction(a[0]) * p ** (-t), Fraction(b[0])),
                 (Fraction(a[1]) * p ** (-t), Fraction(b[1])))
        out.append(LatticeClass.from_matrix(m, p))
    return out


def crossroad(z0, z1, zinf, ctx, search=24):
    """The unique vertex from which the three half-lines separate.

    Median of the three pairwise connecting axes; independent of the order
    of the arguments.
    """
    pts = [primitive_pair(z) for z in (z0, z1, zinf)]
    if len({pts[0], pts[1], pts[2]}) < 3 or any(
            pts[i][0] * pts[j][1] == pts[i][1] * pts[j][0]
            for i in range(3) for j in range(i + 1, 3)):
        raise LatticeError("crossroad needs three distinct points")
    axes = []
    for (i, j) in ((0, 1), (0, 2), (1, 2)):
        keys = {v.key() for v in geodesic_between_points(pts[i], pts[j], ctx, -search, search)}
        axes.append(keys)
    common = axes[0] & axes[1] & axes[2]
    if len(common) != 1:
        raise LatticeError(f"median search window too small or degenerate: {len(common)} hits")
    a, b = common.pop()
    return LatticeClass(ctx.p, a, b)


@dataclass(frozen=True)
class TreePatch:
    """Ball in the tree: directed graph + lattice labels, oriented away from base."""

    graph: DirectedGraph
    labels: dict          # vertex id -> LatticeClass
    base: int
    depth: dict           # vertex id -> distance from base
    radius: int
    ctx: PadicContext

    def vertex_of_class(self, c):
        for v, lab in self.labels.items():
            if lab.key() == c.key():
                return v
        return None

    def interior(self):
        return [v for v in self.graph.vertices if v not in self.graph.frontier]


def build_tree_patch(ctx, center=None, radius=2):
    """Ball of the given radius around a class (default: the standard lattice).

    Positive edges point away from the base.  Frontier vertices (at the full
    radius) are flagged; every interior vertex has exactly q + 1 neighbors.
    """
    if radius < 0:
        raise LatticeError("radius must be >= 0")
    if radius > ctx.precision:
        raise LatticeError("radius exceeds the precision budget")
    center = center or base_class(ctx)
    labels = {0: center}
    key_to_id = {center.key(): 0}
    depth = {0: 0}
    edges = []
    eid = 0
    current = [0]
    for d in range(radius):
        nxt = []
        for vid in current:
            for nb in vertex_neighbors(labels[vid], ctx):
                k = nb.key()
                if k in key_to_id:
                    continue
                nid = len(labels)
                labels[nid] = nb
                key_to_id[k] = nid
                depth[nid] = d + 1
                edges.append((eid, vid, nid))
                eid += 1
                nxt.append(nid)
        current = nxt
    frontier = {v for v, d in depth.items() if d == radius} if radius > 0 else set()
    g = DirectedGraph.build(range(len(labels)), edges, frontier)
    return TreePatch(g, labels, 0, depth, radius, ctx)


def graph_distance(patch, u, v):
    """BFS distance in the patch graph (ignoring orientation)."""
    if u == v:
        return 0
    adj = {x: set() for x in patch.graph.vertices}
    for k in range(patch.graph.n_pos):
        a, b = patch.graph.pos_src[k], patch.graph.pos_dst[k]
        adj[a].add(b)
        adj[b].add(a)
    seen = {u: 0}
    queue = [u]
    while queue:
        x = queue.pop(0)
        for y in adj[x]:
            if y not in seen:
                seen[y] = seen[x] + 1
                if y == v:
                    return seen[y]
                queue.append(y)
    raise GraphError(f"{u} and {v} are not connected in the patch")
