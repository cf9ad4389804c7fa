"""Field-extension functoriality: subdivision, edge-matrix blowup, walk embedding.

An extension with ramification index e and residue degree f acts on the
graph side by replacing every positive edge with a chain of e edges of
metric length 1/e (K-normalized distance preserved) and by replacing q with
q^f wherever the residue cardinality enters.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from treezeta.graphs import DirectedGraph, EdgeMatrix, GraphError, subdivide_edges


class ExtensionError(ValueError):
    pass


@dataclass(frozen=True)
class ExtensionParams:
    e: int = 1
    f: int = 1

    def __post_init__(self):
        if self.e < 1 or self.f < 1:
            raise ExtensionError("e and f must be >= 1")

    @property
    def degree(self):
        return self.e * self.f

    def q_ext(self, q):
        return q ** self.f


@dataclass(frozen=True)
class ExtendedGraph:
    graph: DirectedGraph
    chains: dict          # original positive id -> tuple of chain ids
    params: ExtensionParams

    def word_image(self, g_old, word):
        out = []
        for w in word:
            pid, sign = g_old.edge_label(w)
            chain = self.chains.get(pid, (pid,))
            seq = chain if sign > 0 else tuple(reversed(chain))
            out.extend(self.graph.oriented_of(c, sign) for c in seq)
        return tuple(out)


def extend_graph(g, params):
    """Every positive edge becomes a chain of e edges of length 1/e."""
    if params.e == 1:
        return ExtendedGraph(
            DirectedGraph.build(
                g.vertices,
                [(g.pos_ids[k], g.pos_src[k], g.pos_dst[k]) for k in range(g.n_pos)],
                g.frontier, g.edge_length),
            {}, params)
    sub = subdivide_edges(g, {pid: params.e for pid in g.pos_ids})
    g2 = DirectedGraph.build(
        sub.graph.vertices,
        [(sub.graph.pos_ids[k], sub.graph.pos_src[k], sub.graph.pos_dst[k])
         for k in range(sub.graph.n_pos)],
        sub.graph.frontier, g.edge_length / params.e)
    return ExtendedGraph(g2, sub.chains, params)


def extend_edge_matrix(aplus, e):
    """Blockwise chain extension of a positive edge matrix.

    Each edge w becomes w^(1)..w^(e), ordered original-major; within a chain
    each edge feeds the next, and the last feeds w'^(1) whenever the
    original matrix had w -> w'.
    """
    entries = aplus.entries if isinstance(aplus, EdgeMatrix) else tuple(map(tuple, aplus))
    n = len(entries)
    for row in entries:
        if len(row) != n or any(x not in (0, 1) for x in row):
            raise ExtensionError("input must be a square 0/1 matrix")
    if e < 1:
        raise ExtensionError("e must be >= 1")
    if e == 1:
        idx = aplus.index if isinstance(aplus, EdgeMatrix) else tuple(range(n))
        return EdgeMatrix(tuple(idx), entries)
    size = n * e
    out = [[0] * size for _ in range(size)]
    for i in range(n):
        for t in range(e - 1):
            out[i * e + t][i * e + t + 1] = 1
        for j in range(n):
            if entries[i][j]:
                out[i * e + e - 1][j * e] = 1
    base_idx = aplus.index if isinstance(aplus, EdgeMatrix) else tuple(range(n))
    idx = tuple((base_idx[i], t + 1) for i in range(n) for t in range(e))
    return EdgeMatrix(idx, tuple(tuple(r) for r in out))


def walk_embedding(g, word, ext):
    """Replace each edge of an admissible word by its e-chain.

    Satisfies J(T(w)) = T^e(J(w)) exactly on finite words, T being the left
    shift where defined.
    """
    for w1, w2 in zip(word, word[1:]):
        if not g.admissible(w1, w2):
            raise ExtensionError("input word is not admissible")
    return ext.word_image(g, word)


def left_shift(word, k=1):
    if len(word) < k:
        raise ExtensionError("word too short to shift")
    return tuple(word[k:])


def filtration_restriction_ranks(kgraph, e, j_max, q):
    """Dimension/rank table of the restriction maps induced by the walk
    embedding, with the exact intertwining r o delta_e = delta o r.

    Returns one row per j <= j_max with the dimensions of the L- and K-level
    cylinder modules, the rank of the restriction, surjectivity onto the
    K-cylinder generators, and whether the delta intertwining holds as an
    exact integer matrix identity.
    """
    from treezeta.dynamics import build_sft, word_list
    from treezeta import exact

    if j_max < 1:
        raise ExtensionError("j_max must be >= 1")
    params = ExtensionParams(e=e)
    ext = extend_graph(kgraph, params)
    sk = build_sft(kgraph, q)
    sl = build_sft(ext.graph, q)
    rows = []
    for j in range(1, j_max + 1):
        kwords = word_list(sk, j + 1)
        lwords = word_list(sl, j * e + 1)
        r_hi = restriction_matrix(kgraph, ext, kwords, lwords)
        rank_r = exact.rank(r_hi) if r_hi and r_hi[0] else 0
        ok = _delta_intertwining(kgraph, ext, sk, sl, j, e)
        rows.append({
            "j": j,
            "dim_L": len(lwords),
            "dim_K": len(kwords),
            "rank_restriction": rank_r,
            "surjective_on_cylinders": rank_r == len(kwords),
            "delta_intertwining_exact": ok,
        })
    return rows


def restriction_matrix(kgraph, ext, kwords, lwords):
    """Matrix of r(f) = f o J on cylinder bases.

    Rows are K-words, columns L-words: r(chi_sigma) = sum over K-words rho
    whose embedded image starts with sigma.
    """
    cut = len(lwords[0]) if lwords else 0
    lindex = {w: i for i, w in enumerate(lwords)}
    mat = [[0] * len(lwords) for _ in range(len(kwords))]
    for ki, rho in enumerate(kwords):
        sigma = ext.word_image(kgraph, rho)[:cut]
        if sigma in lindex:
            mat[ki][lindex[sigma]] = 1
    return mat


def _delta_intertwining(kgraph, ext, sk, sl, j, e):
    """r o delta_e == delta o r as exact integer matrices at level j."""
    from treezeta.dynamics import delta_matrix_power, word_list
    from treezeta import exact

    dl = delta_matrix_power(sl, (j - 1) * e + 1, e)   # L len (j-1)e+1 -> je+1
    dk = delta_matrix_power(sk, j, 1)                 # K len j -> j+1
    lw_lo = word_list(sl, (j - 1) * e + 1)
    lw_hi = word_list(sl, j * e + 1)
    kw_lo = word_list(sk, j)
    kw_hi = word_list(sk, j + 1)
    r_hi = restriction_matrix(kgraph, ext, kw_hi, lw_hi)
    r_lo = restriction_matrix(kgraph, ext, kw_lo, lw_lo)
    lhs = exact.mat_mul(r_hi, dl)
    rhs = exact.mat_mul(dk, r_lo)
    return len(lhs) == len(rhs) and all(
        lhs[i][k] == rhs[i][k] for i in range(len(lhs)) for k in range(len(lhs[0])))
