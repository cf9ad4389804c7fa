"""Schottky groups acting on the tree: axes, bridges, quotient dual graphs.

Freeness/discreteness is certified heuristically: every reduced word up to
the configured bound must be hyperbolic.  Quotient identification of patch
vertices uses reduced words up to a length L certified sufficient by
2 * radius < (L + 1) * min translation length: longer elements move every
patch vertex out of the patch.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from treezeta.graphs import (DirectedGraph, GraphError, append_tails,
                             subdivide_edges, TailResult)
from treezeta.lattices import (LatticeClass, TreePatch, act_on_vertex,
                               base_class, build_tree_patch, det2,
                               lattice_distance, mat_inv2, mat_mul2, _frac_mat)
from treezeta.padic import PadicContext, valuation, INFINITY


class SchottkyError(ValueError):
    pass


def hyperbolic_type(m, ctx):
    """(hyperbolic?, translation length) from the Newton polygon of the
    characteristic polynomial: hyperbolic iff 2 v(tr) < v(det); the length
    is v(det) - 2 v(tr).  Both outputs are scale invariant."""
    m = _frac_mat(m)
    det = det2(m)
    if det == 0:
        raise SchottkyError("singular matrix")
    tr = m[0][0] + m[1][1]
    vt, vd = ctx.val(tr), ctx.val(det)
    hyperbolic = 2 * vt < vd
    length = int(vd - 2 * vt) if hyperbolic else 0
    return hyperbolic, length


@dataclass(frozen=True)
class SchottkyGroup:
    ctx: PadicContext
    generators: tuple          # tuple of 2x2 Fraction matrices
    word_bound: int = 6

    @staticmethod
    def build(ctx, generators, word_bound=6):
        gens = tuple(_frac_mat(m) for m in generators)
        grp = SchottkyGroup(ctx, gens, word_bound)
        grp.certify()
        return grp

    @property
    def genus(self):
        return len(self.generators)

    def letters(self):
        """Generator letters and inverses as (index, matrix); index < 0 inverse."""
        out = []
        for i, m in enumerate(self.generators, start=1):
            out.append((i, m))
            out.append((-i, mat_inv2(m)))
        return out

    def reduced_words(self, max_len, include_empty=False):
        """All reduced words as tuples of letter indices, by length."""
        letters = [i for i, _ in self.letters()]
        words = [()] if include_empty else []
        layer = [(i,) for i in letters]
        for n in range(max_len):
            words.extend(layer)
            nxt = []
            for w in layer:
                for i in letters:
                    if i != -w[-1]:
                        nxt.append(w + (i,))
            layer = nxt
        return words

    def word_matrix(self, word):
        mats = {i: m for i, m in self.letters()}
        out = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
        for i in word:
            out = mat_mul2(out, mats[i])
        return out

    def certify(self):
        """Every reduced word up to word_bound must be hyperbolic."""
        for i, m in enumerate(self.generators):
            hyp, _ = hyperbolic_type(m, self.ctx)
            if not hyp:
                raise SchottkyError(f"generator {i} is not hyperbolic")
        for w in self.reduced_words(self.word_bound):
            hyp, _ = hyperbolic_type(self.word_matrix(w), self.ctx)
            if not hyp:
                raise SchottkyError(f"reduced word {w} is not hyperbolic; "
                                    "group fails the Schottky certificate")
        return True

    def min_translation_length(self):
        return min(hyperbolic_type(m, self.ctx)[1] for m in self.generators)


# -- axes and bridges --------------------------------------------------------

def axis_vertices(m, patch, ctx=None):
    """Patch vertices minimizing displacement, ordered along the axis.

    For a hyperbolic m these are exactly the vertices with
    d(v, m v) = translation length; the returned segment is checked to be a
    path mapped into itself shifted by the translation length.
    """
    ctx = ctx or patch.ctx
    hyp, ell = hyperbolic_type(m, ctx)
    if not hyp:
        raise SchottkyError("matrix is not hyperbolic, no axis")
    hits = []
    for v, lab in patch.labels.items():
        if lattice_distance(lab, act_on_vertex(m, lab)) == ell:
            hits.append(v)
    if not hits:
        raise SchottkyError("no axis vertex inside the patch; increase the radius")
    return _order_path(patch, hits)


def _order_path(patch, vertex_ids):
    """Order a set of patch vertices that forms a path, smallest-id end first."""
    vset = set(vertex_ids)
    adj = {v: [] for v in vertex_ids}
    g = patch.graph
    for k in range(g.n_pos):
        a, b = g.pos_src[k], g.pos_dst[k]
        if a in vset and b in vset:
            adj[a].append(b)
            adj[b].append(a)
    ends = sorted(v for v in vertex_ids if len(adj[v]) <= 1)
    if not ends:
        raise SchottkyError("axis vertices do not form a path in the patch")
    start = ends[0]
    out = [start]
    prev = None
    cur = start
    while True:
        nxts = [x for x in adj[cur] if x != prev]
        if not nxts:
            break
        prev, cur = cur, nxts[0]
        out.append(cur)
    if len(out) != len(vertex_ids):
        raise SchottkyError("axis vertices do not form a single path in the patch")
    return out


@dataclass(frozen=True)
class BridgeResult:
    vertices: tuple       # shortest connector, endpoints included; empty if crossing
    intersection: tuple   # shared vertices when the axes meet

    @property
    def length(self):
        return max(0, len(self.vertices) - 1)


def bridge(axis_a, axis_b, patch):
    """Shortest connector between two axes sharing no edge with either.

    Crossing axes are reported through `intersection` (a single shared
    vertex is the degenerate bridge).
    """
    sa, sb = set(axis_a), set(axis_b)
    missing = (sa | sb) - set(patch.graph.vertices)
    if missing:
        raise SchottkyError(f"axis vertices {sorted(missing)} are outside the patch")
    shared = sorted(sa & sb)
    if shared:
        return BridgeResult((), tuple(shared))
    g = patch.graph
    adj = {v: set() for v in g.vertices}
    for k in range(g.n_pos):
        a, b = g.pos_src[k], g.pos_dst[k]
        adj[a].add(b)
        adj[b].add(a)
    # multi-source BFS from axis A to the first vertex of axis B
    parent = {v: v for v in sa}
    queue = sorted(sa)
    hit = None
    while queue and hit is None:
        v = queue.pop(0)
        for u in sorted(adj[v]):
            if u not in parent:
                parent[u] = v
                if u in sb:
                    hit = u
                    break
                queue.append(u)
    if hit is None:
        raise SchottkyError("axes are not connected inside the patch")
    path = [hit]
    while parent[path[-1]] != path[-1]:
        path.append(parent[path[-1]])
    path.reverse()
    axis_edges = _edge_set(patch, axis_a) | _edge_set(patch, axis_b)
    for x, y in zip(path, path[1:]):
        if frozenset((x, y)) in axis_edges:
            raise SchottkyError("bridge shares an edge with an axis")
    return BridgeResult(tuple(path), ())


def _edge_set(patch, ordered_vertices):
    return {frozenset(p) for p in zip(ordered_vertices, ordered_vertices[1:])}


# -- Schottky subtree and reduction graphs -----------------------------------

def build_schottky_tree(group, word_len, radius):
    """Union of the axes of all reduced words of length <= word_len, joined
    by connecting geodesics, inside a radius-`radius` patch: a truncation of
    the smallest invariant subtree.  Reports whether word_len+1 would add
    vertices (stabilization signal)."""
    patch = build_tree_patch(group.ctx, radius=radius)
    spans = _axis_union(group, word_len, patch)
    grown = _axis_union(group, word_len + 1, patch)
    sub = _span_subtree(patch, spans)
    return _restrict_patch(patch, sub), grown != spans


def _axis_union(group, word_len, patch):
    out = set()
    for w in group.reduced_words(word_len):
        m = group.word_matrix(w)
        try:
            out.update(axis_vertices(m, patch))
        except SchottkyError:
            continue
    return out


def _span_subtree(patch, vertex_ids):
    """Smallest connected vertex set containing vertex_ids (tree geodesics)."""
    if not vertex_ids:
        raise SchottkyError("nothing to span")
    g = patch.graph
    adj = {v: set() for v in g.vertices}
    for k in range(g.n_pos):
        a, b = g.pos_src[k], g.pos_dst[k]
        adj[a].add(b)
        adj[b].add(a)
    root = min(vertex_ids)
    parent = {root: None}
    queue = [root]
    while queue:
        v = queue.pop(0)
        for u in sorted(adj[v]):
            if u not in parent:
                parent[u] = v
                queue.append(u)
    keep = set()
    for v in vertex_ids:
        while v is not None and v not in keep:
            keep.add(v)
            v = parent[v]
    return keep


def _restrict_patch(patch, vertex_ids):
    g = patch.graph
    edges = [(g.pos_ids[k], g.pos_src[k], g.pos_dst[k]) for k in range(g.n_pos)
             if g.pos_src[k] in vertex_ids and g.pos_dst[k] in vertex_ids]
    sub = DirectedGraph.build(sorted(vertex_ids), edges,
                              frozenset(vertex_ids) & g.frontier)
    labels = {v: patch.labels[v] for v in vertex_ids}
    depth = {v: patch.depth[v] for v in vertex_ids}
    base = patch.base if patch.base in vertex_ids else min(
        vertex_ids, key=lambda v: (depth[v], v))
    return TreePatch(sub, labels, base, depth, patch.radius, patch.ctx)


def reduction_quotient(data, q, n=1, tail_depth=None):
    """Quotient of the level-n reduction tree, built from the dual graph.

    The level-n reduction adds, at every vertex class, the missing tree
    directions up to valence q+1 (new classes are trees, one per deficit),
    iterated n times; the outermost new vertices are the sinks, to which
    tails are appended when tail_depth is given.  Betti number is unchanged.
    """
    if n < 0:
        raise SchottkyError("reduction level must be >= 0")
    g = data.graph
    if n == 0:
        return data
    vmax = max(g.vertices) + 1
    emax = max(g.pos_ids) + 1
    vertices = list(g.vertices)
    edges = [(g.pos_ids[k], g.pos_src[k], g.pos_dst[k]) for k in range(g.n_pos)]

    def valence(v, edge_list):
        out = 0
        for _, s, d in edge_list:
            out += int(s == v) + int(d == v)
        return out

    layer = {v: q + 1 - valence(v, edges) for v in vertices}
    layer = {v: d for v, d in layer.items() if d > 0}
    for _ in range(n):
        nxt = {}
        for v in sorted(layer):
            for _ in range(layer[v]):
                vertices.append(vmax)
                edges.append((emax, v, vmax))
                nxt[vmax] = q       # a new vertex has 1 edge; q more complete it
                vmax += 1
                emax += 1
        layer = nxt
    out = DirectedGraph.build(vertices, edges, g.frontier, g.edge_length)
    words = [tuple(out.oriented_of(*g.edge_label(x)) for x in w)
             for w in data.generator_words]
    tails = None
    if tail_depth:
        tails = append_tails(out, depth=tail_depth)
        out2 = tails.graph
        words = [tuple(out2.oriented_of(*out.edge_label(x)) for x in w) for w in words]
        out = out2
    return DualGraphData(out, data.domain_edges, tuple(words), data.lengths,
                         data.vertex_class, data.edge_class,
                         data.ambient + f"+reduction-{n}", tails)


def reduction_graph(group, base_patch, n, ambient=None):
    """Vertices within tree-distance n of the invariant subtree patch.

    n = 0 returns the input.  For n >= 1 the sink set is nonempty (the new
    outer vertices emit no positive edge inside the graph) and is reported
    via DirectedGraph.sinks().
    """
    if n < 0:
        raise SchottkyError("reduction level must be >= 0")
    if n == 0:
        return base_patch
    ambient = ambient or build_tree_patch(group.ctx, radius=base_patch.radius)
    if max(base_patch.depth.values()) + n > ambient.radius:
        raise SchottkyError("reduction level exceeds the ambient patch; increase radius")
    adj = {v: set() for v in ambient.graph.vertices}
    g = ambient.graph
    for k in range(g.n_pos):
        a, b = g.pos_src[k], g.pos_dst[k]
        adj[a].add(b)
        adj[b].add(a)
    keep = set(base_patch.graph.vertices)
    layer = set(keep)
    for _ in range(n):
        layer = {u for v in layer for u in adj[v]} - keep
        keep |= layer
    return _restrict_patch(ambient, keep)


def _surviving_word_matrices(group, max_len, bound):
    """Matrices of reduced words of length <= max_len with translation
    length <= bound, built incrementally (one matrix product per word).
    Every word is checked hyperbolic, which certifies freeness."""
    letters = group.letters()
    out = []
    layer = [((i,), m) for i, m in letters]
    for _ in range(max_len):
        for w, m in layer:
            hyp, ell = hyperbolic_type(m, group.ctx)
            if not hyp:
                raise SchottkyError(f"reduced word {w} is not hyperbolic: "
                                    "the action is not free")
            if ell <= bound:
                out.append(m)
        nxt = []
        for w, m in layer:
            if len(w) == max_len:
                continue
            for i, mi in letters:
                if i != -w[-1]:
                    nxt.append((w + (i,), mat_mul2(m, mi)))
        layer = nxt
    return out


# -- quotient dual graph ------------------------------------------------------

@dataclass(frozen=True)
class DualGraphData:
    graph: DirectedGraph            # finite quotient (tails appended if sinks)
    domain_edges: tuple             # fundamental domain: one patch positive edge per class
    generator_words: tuple          # loops as oriented-edge words of `graph`
    lengths: tuple                  # word lengths
    vertex_class: dict              # patch vertex -> quotient vertex
    edge_class: dict                # patch positive edge id -> quotient positive id
    ambient: str                    # which tree was quotiented
    tails: TailResult | None = None

    def betti(self):
        """First Betti number, not counting terminal tail loops (truncation
        bookkeeping for the infinite tails, not topology)."""
        loops = len(self.tails.loop_edges) if self.tails else 0
        return (self.graph.n_pos - loops) - len(self.graph.vertices) + \
            self.graph.n_components()


def quotient_dual_graph(group, patch, ambient="schottky-subtree",
                        tail_depth=None):
    """Quotient the patch by the group, with a certified identification bound.

    Returns the finite quotient graph, a fundamental edge domain, and the
    generator loop words (lengths = translation lengths when the patch is
    the invariant subtree).  Appends tails when the quotient has sinks and
    `tail_depth` is given.
    """
    radius = max(patch.depth.values()) if patch.depth else 0
    ell_min = group.min_translation_length()
    L = 1
    while (L + 1) * ell_min <= 2 * radius:
        L += 1
    # generators and inverses always participate; the full reduced-word sweep
    # up to the certificate length L runs when affordable, and otherwise the
    # identification is the generator-orbit closure, certified downstream by
    # the covering-map star check and the generator loop-length checks
    mats = [m for _, m in group.letters()]
    if L <= 8:
        mats.extend(_surviving_word_matrices(group, L, 2 * radius))

    key_to_vertex = {patch.labels[v].key(): v for v in patch.graph.vertices}
    g = patch.graph
    epairs = {g.pos_ids[k]: (g.pos_src[k], g.pos_dst[k]) for k in range(g.n_pos)}
    pair_to_edge = {frozenset(p): e for e, p in epairs.items()}

    rep = {v: v for v in g.vertices}

    def find(table, x):
        while table[x] != x:
            table[x] = table[table[x]]
            x = table[x]
        return x

    # edge orbits carry an orientation parity relative to their root
    eparent = {e: e for e in g.pos_ids}
    eparity = {e: 1 for e in g.pos_ids}

    def efind(e):
        if eparent[e] == e:
            return e, 1
        parent = eparent[e]
        root, parent_par = efind(parent)
        eparent[e] = root
        eparity[e] = eparity[e] * parent_par if parent != root else eparity[e]
        return root, eparity[e]

    def eunion(e1, e2, rel):
        r1, s1 = efind(e1)
        r2, s2 = efind(e2)
        if r1 == r2:
            if s1 * s2 != rel:
                raise SchottkyError(
                    f"edge orbit of {e1} is orientation-reversed onto itself: "
                    "the action is not free")
            return False
        lo, hi = (r1, r2) if r1 < r2 else (r2, r1)
        eparent[hi] = lo
        eparity[hi] = rel * s1 * s2
        return True

    # image caches: matrix index -> vertex -> image vertex (or None)
    images = []
    for m in mats:
        table = {}
        for v in g.vertices:
            table[v] = key_to_vertex.get(act_on_vertex(m, patch.labels[v]).key())
        images.append(table)

    changed = True
    while changed:
        changed = False
        for table in images:
            for v in g.vertices:
                j = table[v]
                if j is None:
                    continue
                a, b = find(rep, v), find(rep, j)
                if a != b:
                    rep[max(a, b)] = min(a, b)
                    changed = True
            for e, (a, b) in epairs.items():
                ia, ib = table[a], table[b]
                if ia is None or ib is None:
                    continue
                e2 = pair_to_edge.get(frozenset((ia, ib)))
                if e2 is None:
                    continue
                rel = 1 if (ia, ib) == epairs[e2] else -1
                if eunion(e, e2, rel):
                    changed = True
    vrep = {v: find(rep, v) for v in g.vertices}
    eclass = {e: efind(e) for e in g.pos_ids}          # edge -> (root, parity)
    erep = {e: rc[0] for e, rc in eclass.items()}

    # covering-map local injectivity: distinct oriented edges at one vertex
    # never share (class, direction); a collision means over-identification
    for v in g.vertices:
        star = []
        for w in g.out_edges(v):
            pid, sign = g.edge_label(w)
            root, par = eclass[pid]
            star.append((root, sign * par))
        if len(set(star)) != len(star):
            raise SchottkyError(
                f"covering check failed at patch vertex {v}: identified star")

    vclasses = sorted(set(vrep.values()))
    eclasses = sorted(set(erep.values()))
    edges = [(e, vrep[epairs[e][0]], vrep[epairs[e][1]]) for e in eclasses]
    q = DirectedGraph.build(vclasses, edges)

    # fundamental domain check: one patch edge per class
    domain = tuple(eclasses)
    seen = {}
    for e in g.pos_ids:
        seen.setdefault(erep[e], []).append(e)
    if sorted(seen.keys()) != list(eclasses):
        raise SchottkyError("fundamental domain is not one representative per class")

    gen_words = []
    lengths = []
    for gi, mg in enumerate(group.generators):
        word = _generator_loop_word(group, mg, patch, q, eclass)
        gen_words.append(word)
        lengths.append(len(word))

    # orbit representatives mix directions along an axis, so reorient the
    # quotient positively along the generator loops (walks are unaffected)
    q, gen_words = _orient_along_loops(q, gen_words)

    tails = None
    if q.sinks() and tail_depth:
        tails = append_tails(q, depth=tail_depth)
        q = tails.graph
    return DualGraphData(q, domain, tuple(gen_words), tuple(lengths),
                         vrep, erep, ambient, tails)


def _orient_along_loops(q, gen_words):
    """Flip positive orientations so generator loops are positive paths."""
    flips = {}
    for word in gen_words:
        for letter in word:
            pid, sign = q.edge_label(letter)
            want = sign < 0
            if pid in flips and flips[pid] != want:
                # two loops traverse a shared edge in opposite directions;
                # keep the first orientation
                continue
            flips[pid] = want
    edges = []
    for k in range(q.n_pos):
        pid, s, d = q.pos_ids[k], q.pos_src[k], q.pos_dst[k]
        if flips.get(pid):
            edges.append((pid, d, s))
        else:
            edges.append((pid, s, d))
    q2 = DirectedGraph.build(q.vertices, edges, q.frontier, q.edge_length)
    new_words = []
    for word in gen_words:
        nw = []
        for letter in word:
            pid, sign = q.edge_label(letter)
            if flips.get(pid):
                sign = -sign
            nw.append(q2.oriented_of(pid, sign))
        new_words.append(tuple(nw))
    return q2, new_words


def _generator_loop_word(group, m, patch, q, eclass):
    """Loop word of a generator: project the axis segment v -> m v."""
    axis = axis_vertices(m, patch, group.ctx)
    hyp, ell = hyperbolic_type(m, group.ctx)
    # start at the axis vertex closest to the base (segment is then positive)
    v = min(axis, key=lambda x: (patch.depth[x], x))
    target = act_on_vertex(m, patch.labels[v]).key()
    key_to_vertex = {patch.labels[x].key(): x for x in patch.graph.vertices}
    if target not in key_to_vertex:
        raise SchottkyError("axis segment leaves the patch; increase the radius")
    end = key_to_vertex[target]
    path = _tree_path(patch, v, end)
    word = []
    for a, b in zip(path, path[1:]):
        pid, sign = _patch_edge_between(patch, a, b)
        root, par = eclass[pid]
        word.append(q.oriented_of(root, sign * par))
    word = tuple(word)
    for w1, w2 in zip(word + (word[0],), word[1:] + (word[0],)):
        if not q.admissible(w1, w2):
            raise SchottkyError("generator word is not an admissible repeatable loop")
    if len(word) != ell:
        raise SchottkyError(
            f"generator loop has length {len(word)} != translation length {ell}")
    return word


def _patch_edge_between(patch, a, b):
    g = patch.graph
    for k in range(g.n_pos):
        if (g.pos_src[k], g.pos_dst[k]) == (a, b):
            return g.pos_ids[k], 1
        if (g.pos_src[k], g.pos_dst[k]) == (b, a):
            return g.pos_ids[k], -1
    raise SchottkyError(f"no patch edge between {a} and {b}")


def _tree_path(patch, a, b):
    g = patch.graph
    adj = {v: set() for v in g.vertices}
    for k in range(g.n_pos):
        x, y = g.pos_src[k], g.pos_dst[k]
        adj[x].add(y)
        adj[y].add(x)
    parent = {a: None}
    queue = [a]
    while queue:
        v = queue.pop(0)
        if v == b:
            break
        for u in sorted(adj[v]):
            if u not in parent:
                parent[u] = v
                queue.append(u)
    if b not in parent:
        raise SchottkyError("vertices not connected in patch")
    path = [b]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    path.reverse()
    return path


# -- loop length equalization -------------------------------------------------

def equalize_loop_lengths(data, budget=64):
    """Subdivide quotient edges until all generator loop lengths agree.

    Greedy: repeatedly subdivide an edge traversed by a maximal-deficit set
    of short loops and by no already-maximal loop.  Fails loudly when the
    budget runs out (shared edges can force overshoot).
    """
    g = data.graph
    words = [list(w) for w in data.generator_words]
    lengths = [len(w) for w in words]
    steps = 0
    while len(set(lengths)) > 1:
        if steps >= budget:
            raise SchottkyError(
                f"equalization budget exhausted; partial lengths {lengths}")
        target = max(lengths)
        deficits = [target - L for L in lengths]
        short = [i for i, d in enumerate(deficits) if d > 0]
        # candidate edges: traversed by short loops only
        edge_users = {}
        for i, w in enumerate(words):
            for letter in w:
                pid = g.edge_label(letter)[0]
                edge_users.setdefault(pid, set()).add(i)
        best = None
        for pid, users in sorted(edge_users.items()):
            if users <= set(short):
                score = sum(min(deficits[i], _count_uses(words[i], g, pid)) for i in users)
                key = (-score, pid)
                if best is None or key < best[0]:
                    best = (key, pid)
        if best is None:
            raise SchottkyError(
                f"no edge is traversed only by short loops; lengths {lengths}")
        pid = best[1]
        sub = subdivide_edges(g, {pid: 2})
        words = [list(sub.word_image(g, tuple(w))) for w in words]
        g = sub.graph
        lengths = [len(w) for w in words]
        steps += 1
    return DualGraphData(g, data.domain_edges, tuple(tuple(w) for w in words),
                         tuple(lengths), data.vertex_class, data.edge_class,
                         data.ambient, data.tails)


def _count_uses(word, g, pid):
    return sum(1 for letter in word if g.edge_label(letter)[0] == pid)


def stabilize_dual_graph(data):
    """Heuristic pass removing valence-2 vertices not needed for equivariance.

    Best-effort stand-in for the smallest tree whose quotient is the
    specialization dual graph; flagged as heuristic in reports.
    """
    g = data.graph
    words = [list(w) for w in data.generator_words]
    changed = True
    while changed:
        changed = False
        for v in g.vertices:
            inc = [k for k in range(g.n_pos) if v in (g.pos_src[k], g.pos_dst[k])]
            if len(inc) != 2 or any(g.pos_src[k] == g.pos_dst[k] for k in inc):
                continue
            k1, k2 = inc
            a = g.pos_src[k1] if g.pos_dst[k1] == v else g.pos_dst[k1]
            b = g.pos_src[k2] if g.pos_dst[k2] == v else g.pos_dst[k2]
            if a == v or b == v or a == b:
                continue
            new_id = min(g.pos_ids[k1], g.pos_ids[k2])
            keep = [(g.pos_ids[k], g.pos_src[k], g.pos_dst[k])
                    for k in range(g.n_pos) if k not in (k1, k2)]
            keep.append((new_id, a, b))
            g2 = DirectedGraph.build([x for x in g.vertices if x != v], keep)
            old1, old2 = g.pos_ids[k1], g.pos_ids[k2]
            new_words = []
            ok = True
            for w in words:
                nw = []
                skip = False
                for letter in w:
                    pid, sign = g.edge_label(letter)
                    if pid == old1 or pid == old2:
                        if skip:
                            skip = False
                            continue
                        nw.append(g2.oriented_of(new_id, sign))
                        skip = True
                    else:
                        nw.append(g2.oriented_of(pid, sign))
                if skip or not _word_is_loop(g2, nw):
                    ok = False
                    break
                new_words.append(nw)
            if not ok:
                continue
            g = g2
            words = new_words
            changed = True
            break
    return DualGraphData(g, data.domain_edges,
                         tuple(tuple(w) for w in words),
                         tuple(len(w) for w in words), data.vertex_class,
                         data.edge_class, data.ambient + "+stabilized(heuristic)",
                         data.tails)


def _word_is_loop(g, word):
    if not word:
        return False
    for w1, w2 in zip(word, word[1:]):
        if not g.admissible(w1, w2):
            return False
    return g.src(word[0]) == g.rng(word[-1]) and g.admissible(word[-1], word[0])
