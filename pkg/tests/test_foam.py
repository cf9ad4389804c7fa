import math

import pytest

from treezeta.dynamics import build_sft, filtration_space, theta_counts, word_list
from treezeta.foam import (FoamBlock, FoamError, blocks_from_document,
                           blocks_to_document, build_foam_graph, foam_betti,
                           foam_embeddings)
from treezeta.graphs import DirectedGraph, append_tails
from treezeta.operators import embed_cohomology, full_collection_rank
from treezeta.padic import PadicContext
from treezeta.schottky import (DualGraphData, SchottkyGroup, build_schottky_tree,
                               quotient_dual_graph, reduction_quotient)


def g1_dual():
    ctx = PadicContext(2)
    grp = SchottkyGroup.build(ctx, [((2, 0), (0, 1))], word_bound=4)
    st, _ = build_schottky_tree(grp, 1, 4)
    return quotient_dual_graph(grp, st)


def test_no_attachments_keeps_graph():
    dual = g1_dual()
    fg = build_foam_graph(dual, [FoamBlock(0j, 1, 0, loops=dual.generator_words)],
                          q=2, tail_depth=4)
    # sink-free dual graph with no new edges stays as it is
    assert fg.graph.n_pos == dual.graph.n_pos
    assert foam_betti(fg) == dual.betti()


def test_two_attachments_add_trees():
    dual = g1_dual()
    blk = FoamBlock(0j, 0, 2, vertex=min(dual.graph.vertices))
    fg = build_foam_graph(dual, [blk], q=2, tail_depth=3)
    assert foam_betti(fg) == dual.betti()
    assert len(fg.attach_edges) == 2
    # each new edge continues into a tail: repeated tail words are admissible
    for i in range(2):
        word = fg.tail_word(0, i, 4)
        g = fg.graph
        assert all(g.admissible(a, b) for a, b in zip(word, word[1:]))


def test_tail_word_hits_depth_guard():
    dual = g1_dual()
    blk = FoamBlock(0j, 0, 1, vertex=min(dual.graph.vertices))
    fg = build_foam_graph(dual, [blk], q=2, tail_depth=3)
    # the path may continue onto the terminal loop; very long words still work
    word = fg.tail_word(0, 0, 6)
    assert len(word) == 6


def test_attachment_vertex_validation():
    dual = g1_dual()
    with pytest.raises(FoamError):
        build_foam_graph(dual, [FoamBlock(0j, 0, 1, vertex=999)])


def test_conservativity_of_theta_for_old_words():
    dual = g1_dual()
    red = reduction_quotient(dual, q=2, n=1, tail_depth=5)
    s_old = build_sft(red.graph, 2)
    blk = FoamBlock(0j, 0, 1, vertex=min(red.graph.vertices))
    fg = build_foam_graph(red, [blk], q=2, tail_depth=4)
    s_new = build_sft(fg.graph, 2)
    new_pos = {fg.graph.oriented_of(e, sgn)
               for e in set(fg.graph.pos_ids) - set(red.graph.pos_ids)
               for sgn in (1, -1)}
    for n in range(1, 5):
        old_words = set(word_list(s_old, n))
        avoiding = {w for w in word_list(s_new, n) if not set(w) & new_pos}
        # ids are preserved, so words avoiding the new edges coincide
        old_as_new = {tuple(fg.graph.oriented_of(*red.graph.edge_label(x)) for x in w)
                      for w in old_words}
        assert avoiding == old_as_new


def test_degeneration_to_split_case():
    dual = g1_dual()
    red = reduction_quotient(dual, q=2, n=1, tail_depth=5)
    s = build_sft(red.graph, 2)
    f = filtration_space(s, 3)
    blk = FoamBlock(0j, 1, 0, loops=red.generator_words)
    fg = build_foam_graph(red, [blk], q=2, tail_depth=4)
    # no new edges: same graph, so the same filtration applies
    s2 = build_sft(fg.graph, 2)
    f2 = filtration_space(s2, 3)
    embs = foam_embeddings(fg, f2, 1, 3)
    plain = embed_cohomology(f, red.generator_words, 3)
    assert embs[0].per_level_rank == plain.per_level_rank
    assert embs[0].trace_table == plain.trace_table


def test_tail_vector_block():
    dual = g1_dual()
    red = reduction_quotient(dual, q=2, n=1, tail_depth=5)
    blk = FoamBlock(complex(0, math.pi / math.log(2)), 0, 1,
                    vertex=min(red.graph.vertices))
    fg = build_foam_graph(red, [blk], q=2, tail_depth=4)
    s = build_sft(fg.graph, 2)
    f = filtration_space(s, 3)
    embs = foam_embeddings(fg, f, 1, 3)
    assert embs[0].per_level_rank == {1: 1, 2: 1, 3: 1}


def test_two_block_dims_and_orthogonality():
    dual = g1_dual()
    red = reduction_quotient(dual, q=2, n=1, tail_depth=5)
    blocks = [FoamBlock(0j, 1, 0, loops=red.generator_words),
              FoamBlock(complex(0, math.pi / math.log(2)), 0, 2,
                        vertex=min(red.graph.vertices))]
    fg = build_foam_graph(red, blocks, q=2, tail_depth=3)
    s = build_sft(fg.graph, 2)
    f = filtration_space(s, 2)
    embs = foam_embeddings(fg, f, 1, 2)
    assert embs[0].per_level_rank == {1: 1, 2: 1}        # d_lambda = 1
    assert embs[1].per_level_rank == {1: 2, 2: 2}        # d_lambda = 2
    # the generating cylinders across blocks are disjoint, so the
    # characteristic functions are exactly orthogonal (the projected
    # components share a span subtraction and need not be
    w_loop = red.generator_words[0] * 2
    chi_loop = f.refine(w_loop)
    for i in range(2):
        chi_tail = f.refine(fg.tail_word(1, i, 2))
        assert sum(a * b for a, b in zip(chi_loop, chi_tail)) == 0
    # combined block dimensions realize d = d_gamma + d_zero per level
    assert embs[0].trace_table[2] + embs[1].trace_table[2] == 3


def test_cylinder_collision_rejected():
    dual = g1_dual()
    red = reduction_quotient(dual, q=2, n=1, tail_depth=5)
    blocks = [FoamBlock(0j, 1, 0, loops=red.generator_words),
              FoamBlock(1j, 1, 0, loops=red.generator_words)]
    fg = build_foam_graph(red, blocks, q=2, tail_depth=3)
    s = build_sft(fg.graph, 2)
    f = filtration_space(s, 2)
    with pytest.raises(FoamError) as err:
        foam_embeddings(fg, f, 1, 2)
    assert "collision" in str(err.value)


def test_blocks_document_roundtrip():
    blocks = [FoamBlock(complex(0.5, 1.25), 1, 2, vertex=0, loops=((0, 2),))]
    doc = blocks_to_document(blocks)
    back = blocks_from_document(doc)
    assert back[0].alpha == blocks[0].alpha
    assert back[0].d_gamma == 1 and back[0].d_zero == 2
    assert back[0].loops == ((0, 2),)
