"""Command-line interface: one subcommand per pipeline stage.

Exit codes: 0 success, 2 validation error, 3 numerical-tolerance failure,
64 usage error.  Reports are canonical JSON plus CSV; when --out is given,
matplotlib figures are rendered next to the delimited output (disable with
--no-figures).
"""

from __future__ import annotations

import math
import os
import sys
from fractions import Fraction

import click

from treezeta import docio
from treezeta.padic import PadicContext
from treezeta.graphs import (DirectedGraph, GraphError, append_tails,
                             edge_matrices)
from treezeta.lattices import (LatticeError, TreePatch, build_tree_patch)
from treezeta.schottky import (SchottkyError, SchottkyGroup, build_schottky_tree,
                               equalize_loop_lengths, quotient_dual_graph,
                               reduction_quotient)
from treezeta.dynamics import (DynamicsError, build_sft, cylinder_measure,
                               rank_filtration, shadow_measure, theta_counts)
from treezeta.operators import (OperatorError, build_operators, check_ck_relations)
from treezeta.extension import (ExtensionError, ExtensionParams,
                                extend_edge_matrix, extend_graph)
from treezeta.zeta import (EulerFactorSpec, PoleError, THEOREM_TOL, ZetaError,
                           determinant_for_spec, dirac_spectrum, euler_factor,
                           verify_local_factor)
from treezeta.foam import (FoamError, blocks_from_document, build_foam_graph,
                           foam_betti, foam_embeddings)

VALIDATION_ERRORS = (GraphError, LatticeError, SchottkyError, DynamicsError,
                     OperatorError, ExtensionError, ZetaError, FoamError,
                     ValueError, KeyError, FileNotFoundError)


class ToleranceFailure(Exception):
    pass


@click.group()
def cli():
    """Tree patches, Schottky quotients, shift dynamics, spectral zeta checks."""


def _emit(obj, out, name, figures=(), make_figures=True):
    text = docio.dumps(obj)
    if out:
        os.makedirs(out, exist_ok=True)
        path = os.path.join(out, name + ".json")
        with open(path, "w") as fh:
            fh.write(text)
        click.echo(path)
        if make_figures:
            for fig_fn in figures:
                p = fig_fn(out)
                if p:
                    click.echo(p)
    else:
        click.echo(text, nl=False)


def _write_csv(out, name, header, rows):
    path = os.path.join(out, name + ".csv")
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(x) for x in row) + "\n")
    click.echo(path)
    return path


@cli.command()
@click.option("--p", type=int, required=True, help="prime")
@click.option("--f", type=int, default=1, show_default=True, help="residue degree")
@click.option("--radius", type=int, default=2, show_default=True)
@click.option("--out", type=click.Path(), default=None)
@click.option("--figures/--no-figures", default=True, show_default=True)
def tree(p, f, radius, out, figures):
    """Bruhat-Tits tree patch: graph document with lattice labels."""
    ctx = PadicContext(p, f)
    if f != 1:
        raise LatticeError("explicit patches need f = 1; use `extend` for q^f data")
    patch = build_tree_patch(ctx, radius=radius)
    labels = {v: docio.lattice_to_strings(c) for v, c in patch.labels.items()}
    doc = docio.graph_to_document(patch.graph, base=patch.base, labels=labels)
    doc["depth"] = {str(v): d for v, d in sorted(patch.depth.items())}
    doc["p"] = p
    doc["radius"] = radius

    def fig(outdir):
        from treezeta import plotting
        return plotting.save_graph_figure(
            patch.graph, os.path.join(outdir, "tree.png"),
            title=f"tree patch p={p} radius={radius}")

    _emit(doc, out, "tree", figures=[fig], make_figures=figures)
    if out:
        with open(os.path.join(out, "tree.dot"), "w") as fh:
            fh.write(docio.graph_to_dot(patch.graph))


def _load_patch(path):
    doc = docio.read_json(path)
    g = docio.graph_from_document(doc)
    depth = {int(k): v for k, v in doc["depth"].items()}
    ctx = PadicContext(doc["p"])
    return TreePatch(g, {}, doc.get("base", 0), depth, doc.get("radius", 0), ctx)


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True,
              help="JSON: prime, generators (rational strings), wordBound, radius, "
                   "n, truncation, sGrid")
@click.option("--reduction", "reduction_level", type=int, default=None)
@click.option("--tail-depth", type=int, default=8, show_default=True)
@click.option("--all", "run_all_stages", is_flag=True,
              help="run the whole pipeline (quotient, equalize, sft, ck, euler)")
@click.option("--out", type=click.Path(), default=None)
@click.option("--figures/--no-figures", default=True, show_default=True)
def schottky(config_path, reduction_level, tail_depth, run_all_stages, out, figures):
    """Schottky quotient dual graph (optionally the full pipeline report)."""
    cfg = docio.read_json(config_path)
    ctx = PadicContext(cfg["prime"], cfg.get("f", 1))
    gens = [docio.matrix_from_strings(m) for m in cfg["generators"]]
    grp = SchottkyGroup.build(ctx, gens, word_bound=cfg.get("wordBound", 4))
    st, stable = build_schottky_tree(grp, 1, cfg.get("radius", 6))
    base_dual = quotient_dual_graph(grp, st)
    level = reduction_level if reduction_level is not None else cfg.get("n", 0)
    dual = base_dual
    if level:
        dual = reduction_quotient(base_dual, q=ctx.q, n=level, tail_depth=tail_depth)
    doc = docio.dual_graph_document(dual)
    doc["stabilized_at_word_length_1"] = not stable
    report = {"dual_graph": doc}
    if run_all_stages:
        # dynamics run on the tailed reduction quotient, whose walk space is
        # irreducible (the bare quotient of a thin tree can be degenerate)
        eq = equalize_loop_lengths(base_dual)
        dyn = reduction_quotient(eq, q=ctx.q, n=max(level, 1),
                                 tail_depth=tail_depth)
        report["dynamics_on"] = dyn.ambient
        s = build_sft(dyn.graph, ctx.q)
        n_max = cfg.get("nmax", 5)
        report["theta"] = theta_counts(s, n_max)
        report["rank_F"] = {str(n): rank_filtration(s, n)
                            for n in range(1, min(n_max, 5) + 1)}
        ops = build_operators(build_sft(dyn.graph, ctx.q, mode="paths"),
                              cfg.get("truncation", 4))
        ck = check_ck_relations(ops)
        report["ck"] = {k: v["pass"] for k, v in ck.items()}
        grid = [docio.parse_complex(x) for x in cfg.get("sGrid", ["2"])]
        spec = EulerFactorSpec.split(ctx.q, grp.genus)
        report["euler"] = verify_local_factor(spec, grid)

    def fig(outdir):
        from treezeta import plotting
        return plotting.save_graph_figure(dual.graph,
                                          os.path.join(outdir, "dual_graph.png"),
                                          title="quotient dual graph")

    _emit(report, out, "schottky", figures=[fig], make_figures=figures)
    if run_all_stages and not report["euler"]["all_pass"]:
        raise ToleranceFailure("euler check failed")


@cli.command()
@click.option("--e", "ram", type=int, required=True, help="ramification index")
@click.option("--f", type=int, default=1, show_default=True, help="residue degree")
@click.option("--matrix", "matrix_path", type=click.Path(exists=True), default=None,
              help="0/1 CSV of an A+ matrix")
@click.option("--graph", "graph_path", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), default=None)
@click.option("--figures/--no-figures", default=True, show_default=True)
def extend(ram, f, matrix_path, graph_path, out, figures):
    """Field-extension action: chain-subdivide a graph or blow up an A+ CSV."""
    params = ExtensionParams(e=ram, f=f)
    if matrix_path is None and graph_path is None:
        raise click.UsageError("need --matrix or --graph")
    report = {"e": ram, "f": f}
    figs = []
    if matrix_path:
        with open(matrix_path) as fh:
            mat = docio.matrix_from_csv(fh.read())
        ext = extend_edge_matrix(mat, ram)
        report["matrix"] = [list(r) for r in ext.entries]
        if out:
            os.makedirs(out, exist_ok=True)
            _write_csv(out, "extended_matrix",
                       [f"c{i}" for i in range(len(ext.entries))],
                       [list(r) for r in ext.entries])
    if graph_path:
        g = docio.graph_from_document(docio.read_json(graph_path))
        eg = extend_graph(g, params)
        report["graph"] = docio.graph_to_document(eg.graph)
        report["q_scaling"] = f"q -> q^{f}"

        def fig(outdir):
            from treezeta import plotting
            return plotting.save_graph_figure(eg.graph,
                                              os.path.join(outdir, "extended_graph.png"),
                                              title=f"e={ram} extension")
        figs.append(fig)
    _emit(report, out, "extend", figures=figs, make_figures=figures)


@cli.command()
@click.option("--graph", "graph_path", type=click.Path(exists=True), required=True)
@click.option("--q", type=int, required=True)
@click.option("--nmax", type=int, default=5, show_default=True)
@click.option("--tail-depth", type=int, default=0, show_default=True,
              help="append tails of this depth when the graph has sinks")
@click.option("--out", type=click.Path(), default=None)
@click.option("--figures/--no-figures", default=True, show_default=True)
def sft(graph_path, q, nmax, tail_depth, out, figures):
    """Theta table and filtration rank table of the walk subshift."""
    g = docio.graph_from_document(docio.read_json(graph_path))
    if g.sinks() and tail_depth:
        g = append_tails(g, depth=tail_depth).graph
    s = build_sft(g, q)
    theta = theta_counts(s, nmax)
    ranks = {n: rank_filtration(s, n) for n in range(1, min(nmax, 6) + 1)}
    from treezeta.graphs import touches_frontier
    from treezeta.dynamics import word_list
    frontier_words = sum(1 for w in word_list(s, min(nmax, 6) + 1)
                         if touches_frontier(g, w))
    report = {"theta": theta,
              "rank_F": {str(n): r for n, r in ranks.items()},
              "rank_formula": {str(n): theta[n] - theta[n - 1] + 1 for n in ranks},
              "frontier_touching_words_at_top_length": frontier_words}

    def fig(outdir):
        from treezeta import plotting
        return plotting.save_theta_figure(theta, os.path.join(outdir, "theta.png"))

    _emit(report, out, "sft", figures=[fig], make_figures=figures)
    if out:
        _write_csv(out, "theta", ["n", "theta_n"], list(enumerate(theta)))
        _write_csv(out, "ranks", ["n", "rank_F_n", "formula"],
                   [(n, r, theta[n] - theta[n - 1] + 1) for n, r in ranks.items()])


@cli.command()
@click.option("--graph", "graph_path", type=click.Path(exists=True), required=True,
              help="tree patch document (from `tree`)")
@click.option("--word", required=True, help="comma-separated oriented edge ids")
@click.option("--marking", type=int, default=0, show_default=True)
def measure(graph_path, word, marking):
    """Cylinder measure of a finite word on a tree patch (exact rational)."""
    patch = _load_patch(graph_path)
    m = shadow_measure(patch)
    letters = tuple(int(x) for x in word.split(","))
    value = cylinder_measure(m, letters, marking)
    click.echo(docio.rational_str(value))


@cli.command()
@click.option("--graph", "graph_path", type=click.Path(exists=True), required=True)
@click.option("--q", type=int, required=True)
@click.option("--n", "trunc", type=int, default=4, show_default=True)
@click.option("--model", type=click.Choice(["paths", "walks", "both"]),
              default="both", show_default=True)
@click.option("--tail-depth", type=int, default=8, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def ck(graph_path, q, trunc, model, tail_depth, out):
    """Cuntz-Krieger relation report (identity name -> pass/witness)."""
    g = docio.graph_from_document(docio.read_json(graph_path))
    if g.sinks():
        g = append_tails(g, depth=tail_depth).graph
    report = {}
    modes = ("paths", "walks") if model == "both" else (model,)
    for mode in modes:
        ops = build_operators(build_sft(g, q, mode=mode), trunc)
        rep = check_ck_relations(ops)
        report[mode] = {k: {"pass": v["pass"], "witness": v.get("witness")}
                        for k, v in rep.items()}
    raw = docio.graph_from_document(docio.read_json(graph_path))
    from treezeta.operators import toeplitz_defect
    report["toeplitz_defect"] = {str(v): counts
                                 for v, counts in toeplitz_defect(raw).items()}
    _emit(report, out, "ck")


@cli.command()
@click.option("--variant", type=click.Choice(["plain", "scaled"]), default="scaled",
              show_default=True)
@click.option("--l", "ell", type=int, default=1, show_default=True)
@click.option("--q", type=int, required=True)
@click.option("--nmax", type=int, default=20, show_default=True)
@click.option("--out", type=click.Path(), default=None)
@click.option("--figures/--no-figures", default=True, show_default=True)
def dirac(variant, ell, q, nmax, out, figures):
    """Graded Dirac eigenvalue table."""
    spec = dirac_spectrum(variant, ell, q, nmax)
    report = {
        "variant": variant, "ell": ell, "q": q,
        "levels": [{"sign": s, "n": n, "eigenvalue": e} for s, n, e in spec.levels],
        "spacing_constant": spec.spacing_constant(),
        "lambda_n": [spec.lambda_n(n) for n in range(nmax + 1)],
    }

    def fig(outdir):
        from treezeta import plotting
        return plotting.save_spectrum_figure(spec, os.path.join(outdir, "dirac.png"))

    _emit(report, out, "dirac", figures=[fig], make_figures=figures)
    if out:
        _write_csv(out, "dirac", ["sign", "n", "eigenvalue"],
                   [(s, n, repr(e)) for s, n, e in spec.levels])


def _parse_grid(text):
    return [docio.parse_complex(x) for x in text.split(",") if x.strip()]


@cli.command()
@click.option("--mode", type=click.Choice(["split", "foam"]), default="split",
              show_default=True)
@click.option("--q", type=int, required=True)
@click.option("--g", "genus", type=int, default=1, show_default=True)
@click.option("--l", "ell", type=int, default=1, show_default=True,
              help="word length of the spectral triple (the determinant is "
                   "independent of it by the spectral normalization)")
@click.option("--lambdas", "lambdas_path", type=click.Path(exists=True), default=None,
              help='foam mode: JSON [{"alpha": "re+imj", "d": int}, ...]')
@click.option("--s", "s_single", default=None, help="single s value")
@click.option("--s-grid", "s_grid", default="0.5,1,2,3,1+1j,2-0.5j", show_default=True)
@click.option("--tolerance", type=float, default=THEOREM_TOL, show_default=True)
@click.option("--out", type=click.Path(), default=None)
@click.option("--figures/--no-figures", default=True, show_default=True)
def euler(mode, q, genus, ell, lambdas_path, s_single, s_grid, tolerance, out, figures):
    """Regularized determinant vs the closed-form local Euler factor."""
    if mode == "split":
        spec = EulerFactorSpec.split(q, genus)
    else:
        if not lambdas_path:
            raise click.UsageError("foam mode needs --lambdas")
        entries = [(docio.parse_complex(e["alpha"]), int(e["d"]))
                   for e in docio.read_json(lambdas_path)]
        spec = EulerFactorSpec.foam(q, entries)
    grid = _parse_grid(s_single) if s_single else _parse_grid(s_grid)
    report = verify_local_factor(spec, grid, tol=tolerance)
    report["ell"] = ell

    def fig(outdir):
        from treezeta import plotting
        return plotting.save_euler_figure(report, os.path.join(outdir, "euler.png"))

    _emit(report, out, "euler", figures=[fig], make_figures=figures)
    if out:
        rows = []
        for r in report["rows"]:
            rows.append((r["s"], r.get("det"), r.get("inverse_factor"),
                         r.get("relative_error"), r["tolerance"],
                         r.get("pass"), r.get("skipped", "")))
        _write_csv(out, "euler", ["s", "det", "inverse_factor", "relative_error",
                                  "tolerance", "pass", "skipped"], rows)
    if not report["all_pass"]:
        raise ToleranceFailure("local factor check failed on the grid")


@cli.command()
@click.option("--graph", "graph_path", type=click.Path(exists=True), required=True,
              help="dual graph document")
@click.option("--blocks", "blocks_path", type=click.Path(exists=True), required=True,
              help="per-eigenvalue foam blocks document")
@click.option("--q", type=int, required=True)
@click.option("--ell", type=int, required=True)
@click.option("--nmax", type=int, default=2, show_default=True)
@click.option("--tail-depth", type=int, default=6, show_default=True)
@click.option("--s-grid", "s_grid", default="0.5,1,2,3", show_default=True)
@click.option("--out", type=click.Path(), default=None)
@click.option("--figures/--no-figures", default=True, show_default=True)
def foam(graph_path, blocks_path, q, ell, nmax, tail_depth, s_grid, out, figures):
    """Foam graph, per-eigenvalue embeddings, and the determinant product."""
    from treezeta.dynamics import filtration_space
    from treezeta.schottky import DualGraphData

    g = docio.graph_from_document(docio.read_json(graph_path))
    blocks = blocks_from_document(docio.read_json(blocks_path))
    dual = DualGraphData(g, tuple(g.pos_ids), (), (), {}, {}, "document")
    fg = build_foam_graph(dual, blocks, q=q, tail_depth=tail_depth)
    s = build_sft(fg.graph, q)
    filt = filtration_space(s, nmax * ell)
    embs = foam_embeddings(fg, filt, ell, nmax)
    spec = EulerFactorSpec.foam(q, [(b.alpha, b.d) for b in fg.blocks])
    grid = _parse_grid(s_grid)
    det_report = verify_local_factor(spec, grid)
    report = {
        "foam_graph": docio.graph_to_document(fg.graph),
        "betti": foam_betti(fg),
        "blocks": [{"alpha": docio.complex_str(b.alpha), "d_gamma": b.d_gamma,
                    "d_zero": b.d_zero, "vertex": b.vertex,
                    "trace_table": {str(k): v for k, v in embs[i].trace_table.items()}}
                   for i, b in enumerate(fg.blocks)],
        "determinant_product": det_report,
    }

    def fig(outdir):
        from treezeta import plotting
        return plotting.save_graph_figure(fg.graph, os.path.join(outdir, "foam.png"),
                                          title="foam graph")

    _emit(report, out, "foam", figures=[fig], make_figures=figures)
    if not det_report["all_pass"]:
        raise ToleranceFailure("foam determinant product failed")


@cli.command()
@click.option("--out", type=click.Path(), default=None)
def selftest(out):
    """Run the acceptance suite; one pass/fail line per criterion."""
    from treezeta.acceptance import run_all
    reports = run_all()
    for rep in reports:
        status = "PASS" if rep["pass"] else "FAIL"
        click.echo(f"criterion {rep['criterion']:>2}: {status} "
                   f"({rep['seconds']}s) {rep['title']}")
    if out:
        os.makedirs(out, exist_ok=True)
        docio.write_json(os.path.join(out, "selftest.json"), reports)
    if not all(r["pass"] for r in reports):
        raise ToleranceFailure("acceptance suite failed")


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as err:
        err.show()
        sys.exit(64)
    except click.ClickException as err:
        err.show()
        sys.exit(err.exit_code)
    except click.exceptions.Abort:
        sys.exit(130)
    except ToleranceFailure as err:
        click.echo(f"tolerance failure: {err}", err=True)
        sys.exit(3)
    except VALIDATION_ERRORS as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(2)
    sys.exit(0)


if __name__ == "__main__":
    main()
