"""Document formats: graph JSON, DOT export, 0/1 matrix CSV, value strings.

The graph document is {"vertices": [ids], "edges": [{"id", "src", "dst"}]}
with every listed edge positive and its involute implicit; emission is
canonical (sorted keys, sorted ids) so identical data is byte-identical.
Extra keys (frontier, base, labels) survive a round trip.
"""

from __future__ import annotations

import json
from fractions import Fraction

from treezeta.graphs import DirectedGraph, EdgeMatrix, GraphError


def graph_to_document(g, base=None, labels=None):
    doc = {
        "vertices": [int(v) for v in g.vertices],
        "edges": [{"id": int(g.pos_ids[k]), "src": int(g.pos_src[k]),
                   "dst": int(g.pos_dst[k])} for k in range(g.n_pos)],
    }
    if g.frontier:
        doc["frontier"] = sorted(int(v) for v in g.frontier)
    if g.edge_length != 1:
        doc["edge_length"] = str(g.edge_length)
    if base is not None:
        doc["base"] = int(base)
    if labels:
        doc["labels"] = {str(v): labels[v] for v in sorted(labels)}
    return doc


def graph_from_document(doc):
    frontier = frozenset(doc.get("frontier", ()))
    length = Fraction(doc["edge_length"]) if "edge_length" in doc else Fraction(1)
    return DirectedGraph.build(
        doc["vertices"],
        [(e["id"], e["src"], e["dst"]) for e in doc["edges"]],
        frontier, length)


def dumps(obj):
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def write_json(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps(obj))


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def graph_to_dot(g, name="G"):
    lines = [f"graph {name} {{"]
    for v in g.vertices:
        shape = ' [shape=doublecircle]' if v in g.frontier else ""
        lines.append(f"  v{v}{shape};")
    for k in range(g.n_pos):
        lines.append(f"  v{g.pos_src[k]} -- v{g.pos_dst[k]} "
                     f"[label=\"{g.pos_ids[k]}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def matrix_to_csv(matrix):
    entries = matrix.entries if isinstance(matrix, EdgeMatrix) else matrix
    return "\n".join(",".join(str(int(x)) for x in row) for row in entries) + "\n"


def matrix_from_csv(text):
    rows = []
    for line in text.strip().splitlines():
        if not line.strip():
            continue
        rows.append(tuple(int(x) for x in line.split(",")))
    if not rows:
        raise GraphError("empty matrix")
    n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise GraphError("ragged matrix rows")
    return EdgeMatrix(tuple(range(len(rows))), tuple(rows))


def rational_str(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def complex_str(z):
    z = complex(z)
    return f"{z.real:.12g}{z.imag:+.12g}j"


def parse_complex(text):
    return complex(text.replace(" ", ""))


def parse_point(text):
    """P^1 point "[a:b]" with rational entries."""
    body = text.strip()
    if body.startswith("[") and body.endswith("]"):
        body = body[1:-1]
    parts = body.split(":")
    if len(parts) != 2:
        raise GraphError(f"cannot parse projective point {text!r}")
    return (Fraction(parts[0]), Fraction(parts[1]))


def matrix_from_strings(rows):
    """2x2 rational matrix from [[str, str], [str, str]]."""
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def lattice_to_strings(c):
    m = c.matrix()
    return [[rational_str(x) for x in row] for row in m]


def dual_graph_document(data):
    return {
        "graph": graph_to_document(data.graph),
        "generator_words": [list(w) for w in data.generator_words],
        "lengths": list(data.lengths),
        "betti": data.betti(),
        "ambient": data.ambient,
        "domain_edges": list(data.domain_edges),
    }
