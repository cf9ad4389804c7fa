"""Subshifts of quotient graphs, boundary shadow measures, and the exact
filtration of cylinder functions.

Conventions.  The walk shift space of a finite sink-free graph has alphabet
all oriented edges with the directed edge matrix A; theta_n counts
admissible words of length n+1 (so theta_0 is the alphabet size).  Cylinder
modules are graded by word length m (Q_m = span of length-m cylinder
indicators); the filtration F_n = Q_{n+1} / delta Q_n has rank
theta_n - theta_{n-1} + 1, and the graded piece at word length m is
Gr_m = Q_m minus (Q_{m-1} + delta Q_{m-1}), which is where the repeated
generator words project.

Inner products: cylinder vectors are realized by refinement in the
coordinates of the longest tracked words; the boundary measure itself (per
oriented patch edge) is kept exact on the tree side.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from treezeta import exact
from treezeta.graphs import DirectedGraph, GraphError
from treezeta.lattices import TreePatch


class DynamicsError(ValueError):
    pass


# -- shift spaces -------------------------------------------------------------

@dataclass
class ShiftSpace:
    """Subshift of finite type of a sink-free graph's walks (or paths)."""

    graph: DirectedGraph
    q: int
    mode: str = "walks"
    _words: dict = field(default_factory=dict, repr=False)

    @property
    def alphabet(self):
        return self.graph.oriented if self.mode == "walks" else self.graph.positive_oriented

    def admissible(self, w1, w2):
        if self.mode == "walks":
            return self.graph.admissible(w1, w2)
        return self.graph.rng(w1) == self.graph.src(w2)

    def transition_matrix(self):
        letters = self.alphabet
        return tuple(tuple(int(self.admissible(a, b)) for b in letters) for a in letters)

    def continuations(self, w):
        return [b for b in self.alphabet if self.admissible(w, b)]


def build_sft(g, q, mode="walks"):
    if g.sinks():
        raise DynamicsError(
            f"graph has sinks {g.sinks()}; append tails before building the shift space")
    rep = g.validate()
    if not rep.valid:
        raise DynamicsError(f"invalid graph: {rep.violations}")
    return ShiftSpace(g, q, mode)


def word_list(s, length):
    """Admissible words of exactly `length` letters, lexicographic; cached."""
    if length < 1:
        raise DynamicsError("word length must be >= 1")
    key = length
    if key in s._words:
        return s._words[key]
    if length == 1:
        out = [(w,) for w in s.alphabet]
    else:
        out = []
        for word in word_list(s, length - 1):
            last = word[-1]
            for b in s.alphabet:
                if s.admissible(last, b):
                    out.append(word + (b,))
    s._words[key] = out
    return out


def theta_counts(s, n_max):
    """theta_n = number of admissible words of length n+1 = sum entries A^n."""
    if n_max < 0:
        raise DynamicsError("n_max must be >= 0")
    a = [list(r) for r in s.transition_matrix()]
    size = len(a)
    out = [size]
    acc = [[1 if i == j else 0 for j in range(size)] for i in range(size)]
    for _ in range(n_max):
        acc = [[sum(acc[i][k] * a[k][j] for k in range(size)) for j in range(size)]
               for i in range(size)]
        out.append(sum(sum(r) for r in acc))
    return out


def delta_matrix_power(s, from_len, steps=1):
    """Matrix of delta_steps(f) = f -ف o T^steps from length-`from_len` words
    to length-(from_len+steps) words: D[tau][rho] = [tau starts with rho] -
    [tau shifted by steps starts with rho]."""
    lo = word_list(s, from_len)
    hi = word_list(s, from_len + steps)
    n = from_len
    rows = []
    lo_index = {w: i for i, w in enumerate(lo)}
    for tau in hi:
        row = [0] * len(lo)
        head = tau[:n]
        if head in lo_index:
            row[lo_index[head]] += 1
        tail = tau[steps:steps + n]
        if tail in lo_index:
            row[lo_index[tail]] -= 1
        rows.append(row)
    return rows


def rank_delta_certified(s, from_len, steps=1):
    """Exact rank of delta on length-`from_len` words, certified.

    The constants lie in the kernel (verified exactly: every column set of
    the matrix sums to zero by the prefix/shift pairing), so
    rank <= dim - 1; a matching modular lower bound at two primes pins the
    rank exactly.  Falls back to exact elimination when the bound is loose.
    """
    d = delta_matrix_power(s, from_len, steps)
    dim = len(word_list(s, from_len))
    ones = [1] * dim
    image_of_ones = [sum(row[j] * ones[j] for j in range(dim)) for row in d]
    if any(image_of_ones):
        raise DynamicsError("constants are not in the kernel of delta")
    lb = exact.rank_lower_bound(d) if d and d[0] else 0
    if lb == dim - 1:
        return dim - 1
    return exact.rank(d)


def rank_filtration(s, n):
    """rank F_n = theta_n - rank(delta on P_{n-1}); equals
    theta_n - theta_{n-1} + 1 when the kernel is the constants only."""
    if n < 1:
        raise DynamicsError("n must be >= 1 (F_0 = P_0)")
    theta_n = len(word_list(s, n + 1))
    return theta_n - rank_delta_certified(s, n)


# -- boundary shadow measure ---------------------------------------------------

@dataclass(frozen=True)
class ShadowMeasure:
    """Per-oriented-edge boundary masses on a tree patch.

    Away-from-base edges carry q^(-d(rng)-1); toward-base edges carry the
    additive completion (q+1) q^(-2) - q^(-d(src)-1).  Total boundary mass
    is (q+1) q^(-2).
    """

    patch: TreePatch
    q: int
    mass: dict

    def total(self):
        return Fraction(self.q + 1, self.q ** 2)

    def is_truncated(self, w):
        return self.patch.graph.rng(w) in self.patch.graph.frontier


def shadow_measure(patch):
    q = patch.ctx.q
    g = patch.graph
    mass = {}
    for w in g.positive_oriented:       # positive = away from base
        d = patch.depth[g.rng(w)]
        mass[w] = Fraction(1, q ** (d + 1))
    total = Fraction(q + 1, q ** 2)
    for w in g.positive_oriented:
        mass[g.invol(w)] = total - mass[w]
    return ShadowMeasure(patch, q, mass)


def shadow_additivity_defects(m):
    """Interior edges where mass(w) != sum of continuation masses (should be none)."""
    g = m.patch.graph
    bad = []
    for w in g.oriented:
        v = g.rng(w)
        if v in g.frontier:
            continue
        cont = [w2 for w2 in g.out_edges(v) if w2 != g.invol(w)]
        if sum(m.mass[c] for c in cont) != m.mass[w]:
            bad.append(w)
    return bad


def cylinder_measure(m, word, marking=0):
    """Two-sided cylinder mass of a finite admissible patch word.

    Forward shadow of the last edge times the shadow of the involute of the
    first; the marking (window position) does not enter, which is exactly
    the shift invariance of the measure.
    """
    g = m.patch.graph
    if not word:
        raise DynamicsError("empty word has no cylinder")
    for w1, w2 in zip(word, word[1:]):
        if not g.admissible(w1, w2):
            raise DynamicsError("word is not admissible in the patch")
    if m.is_truncated(word[-1]) or m.is_truncated(g.invol(word[0])):
        raise DynamicsError("cylinder touches the truncation frontier; "
                            "its mass is not resolved at this radius")
    del marking
    return m.mass[word[-1]] * m.mass[g.invol(word[0])]


def lift_quotient_word(dual, patch, word):
    """Lift a quotient-graph word to the patch, first edge in the domain.

    Quotient positive ids are patch representative ids, so the first letter
    lifts to its own representative; later letters follow the unique
    covering continuation.  Leaving the patch raises.
    """
    g = patch.graph
    q = dual.graph
    erep = dual.edge_class
    vrep = dual.vertex_class

    def patch_oriented(pid, sign):
        return g.oriented_of(pid, sign)

    first_pid, first_sign = q.edge_label(word[0])
    cur = patch_oriented(first_pid, first_sign)
    out = [cur]
    for letter in word[1:]:
        pid, sign = q.edge_label(letter)
        v = g.rng(cur)
        cands = [w for w in g.out_edges(v)
                 if w != g.invol(cur)
                 and erep.get(g.edge_label(w)[0]) == pid
                 and g.edge_label(w)[1] == sign]
        if not cands:
            raise DynamicsError("lift leaves the patch; increase the radius")
        if len(cands) > 1:
            raise DynamicsError("ambiguous lift: projection is not a covering here")
        cur = cands[0]
        out.append(cur)
    return tuple(out)


# -- exact filtration ----------------------------------------------------------

@dataclass
class FiltrationSpace:
    """Cylinder modules up to a word-length truncation, realized exactly.

    All vectors live in the coordinates of the longest tracked words
    (refinement of shorter cylinders); projections are Euclidean there and
    everything is a Fraction.
    """

    shift: ShiftSpace
    max_len: int
    words: dict           # m -> list of words of length m
    index: dict           # m -> {word: position}
    _graded: dict = field(default_factory=dict, repr=False)

    @property
    def top_dim(self):
        return len(self.words[self.max_len])

    def theta(self, n):
        """Number of admissible words of length n+1 (dim P_n)."""
        if n + 1 <= self.max_len:
            return len(self.words[n + 1])
        return theta_counts(self.shift, n)[n]

    def refine(self, word):
        """Indicator vector of the word's cylinder in top coordinates."""
        m = len(word)
        if m > self.max_len:
            raise DynamicsError("word longer than the truncation")
        cur = [word]
        for _ in range(self.max_len - m):
            nxt = []
            for w in cur:
                for b in self.shift.alphabet:
                    if self.shift.admissible(w[-1], b):
                        nxt.append(w + (b,))
            cur = nxt
        top_index = self.index[self.max_len]
        vec = [Fraction(0)] * self.top_dim
        for w in cur:
            vec[top_index[w]] = Fraction(1)
        return vec

    def q_basis(self, m):
        """Refined basis of Q_m (span of length-m cylinders)."""
        return [self.refine(w) for w in self.words[m]]

    def delta_image_basis(self, m):
        """delta(Q_m) spanning set inside Q_{m+1}, refined to top coordinates."""
        out = []
        for rho in self.words[m]:
            vec = self.refine(rho)
            for b in self.shift.alphabet:
                if self.shift.admissible(b, rho[0]):
                    sub = self.refine((b,) + rho)
                    vec = [x - y for x, y in zip(vec, sub)]
            out.append(vec)
        return out

    def span_projector(self, m):
        """Cached projector onto Q_{m-1} + delta Q_{m-1} in top coordinates."""
        if m in self._graded:
            return self._graded[m]
        if m < 1:
            raise DynamicsError("graded pieces start at word length 1")
        if m == 1:
            span = [[1] * self.top_dim]      # Q_0 = constants, delta Q_0 = 0
        else:
            span = self.q_basis(m - 1) + self.delta_image_basis(m - 1)
        self._graded[m] = exact.SpanProjector(span)
        return self._graded[m]

    def graded_dim(self, m):
        """dim Gr_m = dim Q_m - dim(Q_{m-1} + delta Q_{m-1})."""
        return len(self.words[m]) - self.span_projector(m).rank

    def project_graded(self, m, vec):
        """Component of a Q_m vector in Gr_m."""
        proj = self.span_projector(m).project([Fraction(x) for x in vec])
        return [Fraction(a) - b for a, b in zip(vec, proj)]

    def graded_basis(self, m):
        """Explicit basis of Gr_m in top coordinates (small graphs only)."""
        residuals = [self.project_graded(m, v) for v in self.q_basis(m)]
        rows = [r for r in residuals if any(r)]
        if not rows:
            return []
        red, pivots = exact.rref(rows)
        return [red[i] for i in range(len(pivots))]

    def rank_F(self, n):
        """Filtration rank of F_n = Q_{n+1} / delta Q_n."""
        return rank_filtration(self.shift, n)


def filtration_space(s, max_len):
    """Build the truncated filtration data for word lengths 1..max_len."""
    if max_len < 2:
        raise DynamicsError("truncation must track words of length >= 2")
    words = {m: word_list(s, m) for m in range(1, max_len + 1)}
    index = {m: {w: i for i, w in enumerate(ws)} for m, ws in words.items()}
    for m, ws in words.items():
        if not ws:
            raise DynamicsError(f"no admissible words of length {m}: degenerate shift")
    return FiltrationSpace(s, max_len, words, index)


def kernel_of_delta_is_constants(s, m):
    """Exact check: ker(delta on Q_m) is one-dimensional (the constants)."""
    d = delta_matrix_power(s, m, 1)
    ns = exact.nullspace(d)
    return len(ns) == 1
