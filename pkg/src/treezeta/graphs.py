"""Directed graphs with involutive oriented edges, walks, covers and quotients.

A graph is stored by its positive edges (one per involution pair).  Oriented
edges are integers: the k-th positive edge (sorted by document id) is the
oriented edge 2*k, its involute 2*k+1.  All orderings are by id and every
nondeterministic choice (spanning tree, orbit representative) picks the
smallest id first, so outputs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

DEFAULT_WALK_CAP = 10 ** 6
DEFAULT_TAIL_DEPTH = 16


class GraphError(ValueError):
    pass


class WalkLimitExceeded(GraphError):
    pass


class NonFreeActionError(GraphError):
    pass


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple
    sinks: tuple
    row_finite: bool = True
    locally_finite: bool = True

    @property
    def valid(self):
        return not self.violations


@dataclass(frozen=True)
class EdgeMatrix:
    """0/1 transition matrix over an ordered edge index."""

    index: tuple
    entries: tuple

    def row_sums(self):
        return [sum(r) for r in self.entries]

    def total(self):
        return sum(sum(r) for r in self.entries)

    def power_total(self, n):
        """Sum of entries of the n-th power (exact integers)."""
        size = len(self.index)
        if n == 0:
            return size
        rows = [list(r) for r in self.entries]
        acc = [list(r) for r in self.entries]
        for _ in range(n - 1):
            acc = [[sum(acc[i][k] * rows[k][j] for k in range(size)) for j in range(size)]
                   for i in range(size)]
        return sum(sum(r) for r in acc)


@dataclass(frozen=True)
class DirectedGraph:
    """Finite directed graph; positive edges plus implicit involutes."""

    vertices: tuple
    pos_ids: tuple                       # sorted positive edge document ids
    pos_src: tuple                       # src vertex per positive edge (aligned)
    pos_dst: tuple
    frontier: frozenset = frozenset()    # truncation-frontier vertices
    edge_length: Fraction = Fraction(1)  # metric length per edge (field extensions)

    # -- construction -----------------------------------------------------

    @staticmethod
    def build(vertices, edges, frontier=(), edge_length=Fraction(1)):
        """`edges` is an iterable of (id, src, dst) positive edges."""
        vs = tuple(sorted(set(vertices)))
        vset = set(vs)
        es = sorted(edges)
        ids = tuple(e[0] for e in es)
        if len(set(ids)) != len(ids):
            raise GraphError("duplicate positive edge ids")
        for eid, s, d in es:
            if s not in vset or d not in vset:
                raise GraphError(f"edge {eid} endpoint not a vertex")
        return DirectedGraph(vs, ids,
                             tuple(e[1] for e in es), tuple(e[2] for e in es),
                             frozenset(frontier), edge_length)

    # -- oriented edge accessors ------------------------------------------

    @property
    def n_pos(self):
        return len(self.pos_ids)

    @property
    def oriented(self):
        return tuple(range(2 * self.n_pos))

    @property
    def positive_oriented(self):
        return tuple(range(0, 2 * self.n_pos, 2))

    def src(self, w):
        k, rev = divmod(w, 2)
        return self.pos_dst[k] if rev else self.pos_src[k]

    def rng(self, w):
        k, rev = divmod(w, 2)
        return self.pos_src[k] if rev else self.pos_dst[k]

    @staticmethod
    def invol(w):
        return w ^ 1

    def edge_label(self, w):
        """(positive document id, +1/-1) of an oriented edge."""
        k, rev = divmod(w, 2)
        return self.pos_ids[k], (-1 if rev else 1)

    def oriented_of(self, pos_id, sign=1):
        k = self.pos_ids.index(pos_id)
        return 2 * k + (0 if sign > 0 else 1)

    def out_edges(self, v):
        return tuple(w for w in self.oriented if self.src(w) == v)

    def pos_out(self, v):
        return tuple(w for w in self.positive_oriented if self.src(w) == v)

    def sinks(self):
        """Vertices emitting no positive edge."""
        with_out = {self.pos_src[k] for k in range(self.n_pos)}
        return tuple(v for v in self.vertices if v not in with_out)

    def admissible(self, w1, w2):
        return self.rng(w1) == self.src(w2) and w2 != self.invol(w1)

    def betti(self):
        """First Betti number E - V + (#components) of the realization."""
        return self.n_pos - len(self.vertices) + self.n_components()

    def n_components(self):
        adj = {v: set() for v in self.vertices}
        for k in range(self.n_pos):
            adj[self.pos_src[k]].add(self.pos_dst[k])
            adj[self.pos_dst[k]].add(self.pos_src[k])
        seen = set()
        comps = 0
        for v in self.vertices:
            if v in seen:
                continue
            comps += 1
            stack = [v]
            while stack:
                u = stack.pop()
                if u in seen:
                    continue
                seen.add(u)
                stack.extend(adj[u] - seen)
        return comps

    def is_connected(self):
        return len(self.vertices) <= 1 or self.n_components() == 1

    def validate(self):
        return validate_graph(self)

    def word_vertices(self, word):
        """Vertex itinerary src(w0), rng(w0), rng(w1), ... of an admissible word."""
        if not word:
            return ()
        out = [self.src(word[0])]
        for w in word:
            out.append(self.rng(w))
        return tuple(out)


def validate_graph(g):
    """Invariant check of the stored structure; reports sinks and finiteness."""
    violations = []
    vset = set(g.vertices)
    for w in g.oriented:
        if g.invol(g.invol(w)) != w:
            violations.append(f"involution not involutive at {w}")
        if g.invol(w) == w:
            violations.append(f"involution fixed point at {w}")
        if g.src(g.invol(w)) != g.rng(w) or g.rng(g.invol(w)) != g.src(w):
            violations.append(f"involution does not exchange src/rng at {w}")
        if g.src(w) not in vset or g.rng(w) not in vset:
            violations.append(f"edge {w} has endpoint outside the vertex set")
    return ValidationReport(tuple(violations), g.sinks())


def validate_raw(oriented, positive, src, rng, invol):
    """Diagnose an explicit (possibly broken) edge structure.

    The DirectedGraph representation cannot itself violate the involution
    laws, so raw data checks live here (e.g. a declared fixed point).
    """
    violations = []
    pos = set(positive)
    for w in oriented:
        if invol.get(w) == w:
            violations.append(f"involution fixed point at {w}")
        elif invol.get(invol.get(w)) != w:
            violations.append(f"involution not involutive at {w}")
        if w in invol and (src.get(invol[w]) != rng.get(w) or rng.get(invol[w]) != src.get(w)):
            violations.append(f"involution does not exchange src/rng at {w}")
    flipped = {invol[w] for w in pos if w in invol}
    if pos & flipped or (pos | flipped) != set(oriented):
        violations.append("oriented edges are not the disjoint union of positive and involutes")
    have_out = {src[w] for w in pos if w in src}
    allv = {src[w] for w in oriented if w in src} | {rng[w] for w in oriented if w in rng}
    sinks = tuple(sorted(allv - have_out))
    return ValidationReport(tuple(violations), sinks)


# -- walk enumeration ------------------------------------------------------

def enumerate_walks(g, n, mode="walks", cap=DEFAULT_WALK_CAP):
    """All admissible length-n sequences, lexicographic in oriented-edge ids.

    mode "walks" uses the full oriented alphabet, "paths" only positive
    edges.  Exceeding `cap` raises WalkLimitExceeded rather than truncating.
    """
    if n < 1:
        raise GraphError("walk length must be >= 1")
    letters = g.oriented if mode == "walks" else g.positive_oriented
    out = [(w,) for w in letters]
    for _ in range(n - 1):
        nxt = []
        for word in out:
            last = word[-1]
            for w in letters:
                if g.admissible(last, w):
                    nxt.append(word + (w,))
                    if len(nxt) > cap:
                        raise WalkLimitExceeded(
                            f"more than {cap} walks of length {n}; raise the cap explicitly")
        out = nxt
    return out


def touches_frontier(g, word):
    return any(v in g.frontier for v in g.word_vertices(word))


def edge_matrices(g):
    """(A_plus over positive edges, A over all oriented edges)."""
    pos = g.positive_oriented
    aplus = tuple(tuple(int(g.rng(wi) == g.src(wj)) for wj in pos) for wi in pos)
    alls = g.oriented
    a = tuple(tuple(int(g.admissible(wi, wj)) for wj in alls) for wi in alls)
    return (EdgeMatrix(tuple(g.edge_label(w)[0] for w in pos), aplus),
            EdgeMatrix(alls, a))


# -- tails ------------------------------------------------------------------

@dataclass(frozen=True)
class TailResult:
    graph: DirectedGraph
    tails: dict            # sink vertex -> tuple of new vertices (outward order)
    chain_edges: dict      # sink vertex -> tuple of new positive edge ids
    loop_edges: dict       # sink vertex -> terminal loop positive edge id


def append_tails(g, depth=DEFAULT_TAIL_DEPTH, terminal_loop=True):
    """Attach a depth-`depth` tail plus terminal self-loop to every sink.

    The loop lets walks repeat the last word forever, standing in for the
    infinite tail; the last tail vertex is flagged as truncation frontier.
    Sink-free graphs are returned unchanged.
    """
    sinks = g.sinks()
    if not sinks:
        return TailResult(g, {}, {}, {})
    if depth < 1:
        raise GraphError("tail depth must be >= 1")
    vmax = max(g.vertices) + 1
    emax = max(g.pos_ids) + 1 if g.pos_ids else 0
    vertices = list(g.vertices)
    edges = [(g.pos_ids[k], g.pos_src[k], g.pos_dst[k]) for k in range(g.n_pos)]
    frontier = set(g.frontier)
    tails, chains, loops = {}, {}, {}
    for s in sinks:
        vs = tuple(vmax + i for i in range(depth))
        vmax += depth
        vertices.extend(vs)
        prev = s
        ch = []
        for v in vs:
            edges.append((emax, prev, v))
            ch.append(emax)
            emax += 1
            prev = v
        tails[s] = vs
        chains[s] = tuple(ch)
        if terminal_loop:
            edges.append((emax, vs[-1], vs[-1]))
            loops[s] = emax
            emax += 1
        frontier.add(vs[-1])
    return TailResult(DirectedGraph.build(vertices, edges, frontier, g.edge_length),
                      tails, chains, loops)


def extend_action_to_tails(g, tail_result, vmaps):
    """Extend vertex permutations to appended tails ("translate the whole tail").

    `vmaps` is a list of vertex permutations of the original graph mapping
    sinks to sinks.  Returns permutations of the tailed graph's vertices.
    """
    out = []
    for vmap in vmaps:
        ext = dict(vmap)
        for s, vs in tail_result.tails.items():
            s2 = vmap[s]
            if s2 not in tail_result.tails:
                raise NonFreeActionError(f"sink {s} maps to non-sink {s2}")
            for a, b in zip(vs, tail_result.tails[s2]):
                ext[a] = b
        out.append(ext)
    return out


# -- subdivision ------------------------------------------------------------

@dataclass(frozen=True)
class SubdivisionResult:
    graph: DirectedGraph
    chains: dict        # original positive id -> tuple of chain positive ids

    def word_image(self, g_old, word):
        """Image of an oriented-edge word under the subdivision."""
        g = self.graph
        out = []
        for w in word:
            pid, sign = g_old.edge_label(w)
            chain = self.chains.get(pid, (pid,))
            seq = chain if sign > 0 else tuple(reversed(chain))
            out.extend(g.oriented_of(c, sign) for c in seq)
        return tuple(out)


def subdivide_edges(g, parts):
    """Replace each selected positive edge (with involute) by a chain.

    `parts` maps positive edge document ids to chain lengths >= 1.
    """
    for pid, k in parts.items():
        if pid not in g.pos_ids:
            raise GraphError(f"edge {pid} is not a positive edge")
        if k < 1:
            raise GraphError("parts must be >= 1")
    vmax = max(g.vertices) + 1
    emax = max(g.pos_ids) + 1
    vertices = list(g.vertices)
    edges = []
    chains = {}
    for k in range(g.n_pos):
        pid, s, d = g.pos_ids[k], g.pos_src[k], g.pos_dst[k]
        n = parts.get(pid, 1)
        if n == 1:
            edges.append((pid, s, d))
            continue
        mids = [vmax + i for i in range(n - 1)]
        vmax += n - 1
        vertices.extend(mids)
        stops = [s] + mids + [d]
        ch = []
        for i in range(n):
            edges.append((emax, stops[i], stops[i + 1]))
            ch.append(emax)
            emax += 1
        chains[pid] = tuple(ch)
    return SubdivisionResult(
        DirectedGraph.build(vertices, edges, g.frontier, g.edge_length), chains)


# -- universal cover and fundamental group ----------------------------------

@dataclass(frozen=True)
class CoverResult:
    graph: DirectedGraph
    base: int
    vertex_walks: dict     # cover vertex id -> walk (tuple of oriented ids) from base
    generators: tuple      # free generators as closed oriented-edge words at v0


def spanning_tree_generators(g, v0):
    """Free generators of the fundamental group from a BFS spanning tree.

    One generator per non-tree positive edge: tree path to its source, the
    edge, tree path back.  Deterministic (smallest-id-first BFS).
    """
    if not g.is_connected():
        raise GraphError("graph is not connected")
    parent = {v0: None}          # vertex -> oriented edge used to reach it
    order = [v0]
    queue = [v0]
    tree_pos = set()
    while queue:
        v = queue.pop(0)
        for w in sorted(g.out_edges(v)):
            u = g.rng(w)
            if u not in parent:
                parent[u] = w
                tree_pos.add(g.edge_label(w)[0])
                order.append(u)
                queue.append(u)

    def path_from_base(v):
        out = []
        while parent[v] is not None:
            w = parent[v]
            out.append(w)
            v = g.src(w)
        return tuple(reversed(out))

    gens = []
    for k in range(g.n_pos):
        pid = g.pos_ids[k]
        if pid in tree_pos:
            continue
        w = g.oriented_of(pid, 1)
        to_src = path_from_base(g.src(w))
        from_dst = tuple(g.invol(x) for x in reversed(path_from_base(g.rng(w))))
        gens.append(_reduce_word(g, to_src + (w,) + from_dst))
    return tuple(gens)


def _reduce_word(g, word):
    out = []
    for w in word:
        if out and out[-1] == g.invol(w):
            out.pop()
        else:
            out.append(w)
    return tuple(out)


def universal_cover(g, v0, depth, cap=DEFAULT_WALK_CAP):
    """Depth-`depth` truncation of the universal cover plus free generators.

    Cover vertices are the walks from v0 of length <= depth; edges connect a
    walk to its one-step extensions.  Depth-boundary walks are flagged as
    frontier.
    """
    if v0 not in g.vertices:
        raise GraphError(f"{v0} is not a vertex")
    if not g.is_connected():
        raise GraphError("graph is not connected")
    walks = [()]
    by_len = [[()]]
    for n in range(depth):
        layer = []
        for word in by_len[-1]:
            last_v = v0 if not word else g.rng(word[-1])
            for w in sorted(g.out_edges(last_v)):
                if word and w == g.invol(word[-1]):
                    continue
                layer.append(word + (w,))
                if len(walks) + len(layer) > cap:
                    raise WalkLimitExceeded("universal cover truncation exceeds cap")
        by_len.append(layer)
        walks.extend(layer)
    ids = {word: i for i, word in enumerate(walks)}
    edges = []
    eid = 0
    for word, i in ids.items():
        if not word:
            continue
        j = ids[word[:-1]]
        edges.append((eid, j, i))   # positive = away from base
        eid += 1
    frontier = {ids[w] for w in by_len[-1]} if depth > 0 else set()
    cover = DirectedGraph.build(range(len(walks)), edges, frontier)
    gens = spanning_tree_generators(g, v0)
    return CoverResult(cover, ids[()], {i: w for w, i in ids.items()}, gens)


# -- quotient by a free action ----------------------------------------------

@dataclass(frozen=True)
class QuotientResult:
    graph: DirectedGraph
    vertex_rep: dict      # input vertex -> orbit representative
    edge_rep: dict        # input positive edge id -> orbit representative id


def quotient_by_action(g, vmaps, emaps):
    """Quotient by the group generated by vertex/edge permutation pairs.

    Each (vmap, emap) must commute with src/dst; a fixed vertex or edge of a
    generator aborts with the offending element.  The projection is verified
    to be a covering map on every quotient vertex.
    """
    for gi, (vmap, emap) in enumerate(zip(vmaps, emaps)):
        for k in range(g.n_pos):
            pid = g.pos_ids[k]
            k2 = g.pos_ids.index(emap[pid])
            if vmap[g.pos_src[k]] != g.pos_src[k2] or vmap[g.pos_dst[k]] != g.pos_dst[k2]:
                raise GraphError(f"generator {gi} does not commute with src/dst at edge {pid}")
        nontrivial = any(vmap[v] != v for v in g.vertices) or \
            any(emap[e] != e for e in g.pos_ids)
        if nontrivial:
            fixed_v = [v for v in g.vertices if vmap[v] == v]
            if fixed_v:
                raise NonFreeActionError(f"generator {gi} fixes vertex {fixed_v[0]}")
            fixed_e = [e for e in g.pos_ids if emap[e] == e]
            if fixed_e:
                raise NonFreeActionError(f"generator {gi} fixes edge {fixed_e[0]}")

    vrep = _orbit_reps(g.vertices, [m for m in vmaps])
    erep = _orbit_reps(g.pos_ids, [m for m in emaps])
    vclasses = sorted(set(vrep.values()))
    eclasses = sorted(set(erep.values()))
    edges = []
    for pid in eclasses:
        k = g.pos_ids.index(pid)
        edges.append((pid, vrep[g.pos_src[k]], vrep[g.pos_dst[k]]))
    q = DirectedGraph.build(vclasses, edges, frozenset(vrep[v] for v in g.frontier))

    # covering-map check: star bijection at every vertex
    interior = [v for v in g.vertices if v not in g.frontier]
    for v in interior:
        star = sorted((erep[g.edge_label(w)[0]], g.edge_label(w)[1]) for w in g.out_edges(v))
        qstar = sorted((q.edge_label(w)[0], q.edge_label(w)[1]) for w in q.out_edges(vrep[v]))
        if star != qstar:
            raise NonFreeActionError(
                f"projection is not a covering map at vertex {v}: star {star} vs {qstar}")
    return QuotientResult(q, vrep, erep)


def _orbit_reps(items, maps):
    rep = {x: x for x in items}

    def find(x):
        while rep[x] != x:
            rep[x] = rep[rep[x]]
            x = rep[x]
        return x

    for m in maps:
        for x in items:
            a, b = find(x), find(m[x])
            if a != b:
                if a < b:
                    rep[b] = a
                else:
                    rep[a] = b
    return {x: find(x) for x in items}
