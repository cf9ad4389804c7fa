"""Foam graphs: dual graphs enlarged by per-eigenvalue tail edges.

A non-split special fiber contributes Frobenius eigenvalue blocks
(alpha, d_gamma, d_zero): d_gamma classes are carried by dual-graph loops
as in the split case, d_zero by new outgoing edges at chosen vertices,
each continuing into an appended tail.  The embeddings of both kinds land
in the graded piece at word length N*ell and their block dimensions feed
the per-eigenvalue trace tables of the determinant product.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from treezeta import exact
from treezeta.graphs import DirectedGraph, append_tails
from treezeta.operators import CohomologyEmbedding, OperatorError


class FoamError(ValueError):
    pass


@dataclass(frozen=True)
class FoamBlock:
    alpha: complex          # q^alpha = Frobenius eigenvalue
    d_gamma: int            # loop-carried multiplicity
    d_zero: int             # component-carried multiplicity (new tail edges)
    vertex: int | None = None    # attachment vertex (default: smallest)
    loops: tuple = ()       # d_gamma loop words (oriented ids of the dual graph)

    @property
    def d(self):
        return self.d_gamma + self.d_zero


@dataclass(frozen=True)
class FoamGraph:
    graph: DirectedGraph
    blocks: tuple
    attach_edges: dict      # (block index, i) -> new positive edge id
    loop_edges: tuple       # terminal self-loop ids (truncation bookkeeping)
    base_graph: DirectedGraph

    def tail_word(self, block_index, i, length):
        """Canonical repetition path from an attachment edge: smallest-id
        descending branch, spinning on the terminal loop past the depth."""
        g = self.graph
        eid = self.attach_edges[(block_index, i)]
        word = [g.oriented_of(eid, 1)]
        while len(word) < length:
            v = g.rng(word[-1])
            down = [w for w in g.pos_out(v)
                    if w != g.invol(word[-1]) and g.rng(w) != g.src(w)]
            loops = [w for w in g.pos_out(v)
                     if g.rng(w) == g.src(w) and w != g.invol(word[-1])]
            cand = down or loops
            if not cand:
                raise FoamError("tail too short for the requested repetition length")
            word.append(sorted(cand)[0])
        return tuple(word)


def build_foam_graph(dual, blocks, q=2, tail_depth=6):
    """Attach reduction-style branch trees for the component classes.

    Each of the d_zero attachments at its vertex is a new outgoing edge
    continued by a q-ary branching tree of the given depth (every new
    vertex carries the full q+1 valence of the ambient tree, which is what
    keeps the repeated-word cylinders strictly nested), with terminal
    self-loops at the last layer so the graph stays sink-free.  Trees only:
    the first Betti number is unchanged.
    """
    g = dual.graph
    vmax = max(g.vertices) + 1
    emax = max(g.pos_ids) + 1
    vertices = list(g.vertices)
    edges = [(g.pos_ids[k], g.pos_src[k], g.pos_dst[k]) for k in range(g.n_pos)]
    attach = {}
    loop_ids = []
    frontier = set(g.frontier)
    resolved_blocks = []
    for bi, blk in enumerate(blocks):
        x = blk.vertex if blk.vertex is not None else min(g.vertices)
        if x not in g.vertices:
            raise FoamError(f"attachment vertex {x} is not in the dual graph")
        for i in range(blk.d_zero):
            vertices.append(vmax)
            edges.append((emax, x, vmax))
            attach[(bi, i)] = emax
            layer = [vmax]
            vmax += 1
            emax += 1
            for _ in range(tail_depth - 1):
                nxt = []
                for v in layer:
                    for _ in range(q):
                        vertices.append(vmax)
                        edges.append((emax, v, vmax))
                        nxt.append(vmax)
                        vmax += 1
                        emax += 1
                layer = nxt
            for v in layer:
                edges.append((emax, v, v))
                loop_ids.append(emax)
                emax += 1
                frontier.add(v)
        resolved_blocks.append(FoamBlock(blk.alpha, blk.d_gamma, blk.d_zero, x, blk.loops))
    out = DirectedGraph.build(vertices, edges, frozenset(frontier), g.edge_length)
    if out.sinks():
        raise FoamError(f"dual graph brings its own sinks {out.sinks()}; "
                        "append tails to it first")
    return FoamGraph(out, tuple(resolved_blocks), attach, tuple(loop_ids), g)


def foam_betti(foam):
    """Betti number net of terminal loops (attachments are trees)."""
    g = foam.graph
    return (g.n_pos - len(foam.loop_edges)) - len(g.vertices) + g.n_components()


def foam_embeddings(foam, filtration, ell, n_max):
    """Per-block embeddings: loop repetitions plus tail-word repetitions.

    Returns {block index: CohomologyEmbedding}; the generating cylinders
    must be pairwise distinct across blocks (shared words abort), which
    makes the block projections mutually orthogonal.
    """
    shift = filtration.shift
    if shift.graph is not foam.graph:
        raise FoamError("filtration must be built on the foam graph's shift space")
    used_words = {}
    out = {}
    for bi, blk in enumerate(foam.blocks):
        if blk.d_gamma and not blk.loops:
            raise FoamError(f"block {bi} needs {blk.d_gamma} loop words")
        if blk.d_gamma and any(len(w) != ell for w in blk.loops):
            raise FoamError("loop words must have the common equalized length")
        vectors = {}
        per_level = {}
        trace = {}
        for n in range(1, n_max + 1):
            level_vecs = []
            gen_words = []
            for i, w in enumerate(blk.loops[:blk.d_gamma]):
                gen_words.append(tuple(w) * n)
            for i in range(blk.d_zero):
                gen_words.append(foam.tail_word(bi, i, n * ell))
            for i, word in enumerate(gen_words):
                if word in used_words and used_words[word] != bi:
                    raise FoamError(
                        f"cylinder collision: blocks {used_words[word]} and {bi} share "
                        f"the generating word; choose distinct basis words")
                used_words[word] = bi
                chi = filtration.refine(word)
                phi = filtration.project_graded(n * ell, chi)
                if not any(phi):
                    raise OperatorError(
                        f"block {bi} vector {i} vanishes at level {n * ell}")
                vectors[(i, n)] = phi
                level_vecs.append(phi)
            rank = exact.rank(level_vecs) if level_vecs else 0
            per_level[n] = rank
            trace[n * ell] = rank
        out[bi] = CohomologyEmbedding(
            tuple(tuple(w) for w in blk.loops), ell, n_max, vectors,
            per_level, trace, filtration)
    return out


def blocks_from_document(doc):
    """Parse foam blocks from their document form.

    Each entry: {"alpha": "re+imj", "d_gamma": int, "d_zero": int,
    "vertex": id or null, "loops": [[oriented edge ids]]}.
    """
    out = []
    for entry in doc:
        out.append(FoamBlock(
            alpha=complex(entry["alpha"].replace(" ", "")),
            d_gamma=int(entry["d_gamma"]),
            d_zero=int(entry["d_zero"]),
            vertex=entry.get("vertex"),
            loops=tuple(tuple(w) for w in entry.get("loops", ()))))
    return out


def blocks_to_document(blocks):
    out = []
    for blk in blocks:
        a = complex(blk.alpha)
        out.append({
            "alpha": f"{a.real:.12g}{a.imag:+.12g}j",
            "d_gamma": blk.d_gamma,
            "d_zero": blk.d_zero,
            "vertex": blk.vertex,
            "loops": [list(w) for w in blk.loops],
        })
    return out
