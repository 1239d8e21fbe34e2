"""Graphs of groups with free or finite vertex groups and their normal forms.

Supported shapes: one amalgam edge between two vertices (free products are
amalgams over a trivial edge group), or a single vertex carrying any number of
HNN loops.  Elements are handled as syllable sequences; vertex syllables are
canonical vertex elements and stable letters are ``(name, +-1)``.
"""

from dataclasses import dataclass, field
from math import gcd

from .linalg import p_part, smith_normal_form
from .pgroup import closure, DEFAULT_BUDGET, BudgetExceeded
from .stallings import FoldedGraph
from .words import Presentation, Word, word


class OracleFailure(RuntimeError):
    """Edge membership could not be decided within budget."""


class NotReduced(ValueError):
    pass


class DegenerateLattice(ValueError):
    pass


class FreeVertexGroup:
    """Free group on a presentation's generators; elements are reduced Words."""

    def __init__(self, presentation):
        if presentation.relators:
            raise ValueError("free vertex group needs a presentation without relators")
        self.presentation = presentation
        self.name = presentation.name

    def identity(self):
        return Word()

    def mul(self, x, y):
        return x * y

    def inv(self, x):
        return x.inverse()

    def from_word(self, w):
        return self.presentation.check_word(w).free_reduce()

    def to_word(self, x):
        return x

    def is_identity(self, x):
        return not x.letters

    def subgroup(self, gen_words, names):
        return _FreeEdgeSubgroup(self, [self.from_word(g) for g in gen_words], names)


class _FreeEdgeSubgroup:
    def __init__(self, vertex, gens, names):
        self.vertex = vertex
        self.graph = FoldedGraph(gens, vertex.presentation.generators, names)

    def express(self, x):
        return self.graph.express(x)

    def contains(self, x):
        return self.graph.contains(x)

    def coset_rep(self, x):
        return self.graph.coset_rep(x)


class FiniteVertexGroup:
    """A finite vertex group realised by a FiniteGroupTable.

    ``images`` maps presentation generators to table indices; relators are
    checked.  Faithfulness of the realisation is the caller's assertion.
    """

    def __init__(self, presentation, table, images, budget=DEFAULT_BUDGET):
        self.presentation = presentation
        self.name = presentation.name
        self.table = table
        self.images = dict(zip(presentation.generators, images)) if not isinstance(images, dict) else dict(images)
        self.budget = budget
        for r in presentation.relators:
            if self.from_word(r) != 0:
                raise ValueError("relator %s fails in the realisation" % r)
        # shortlex words over the presentation generators for every element
        self._words = {0: Word()}
        frontier = [0]
        order = []
        for s in presentation.generators:
            order += [(s, 1), (s, -1)]
        while frontier:
            nxt = []
            for x in frontier:
                for s, e in order:
                    g = self.images[s] if e > 0 else table.inv(self.images[s])
                    y = table.mul(x, g)
                    if y not in self._words:
                        self._words[y] = Word(self._words[x].letters + ((s, e),))
                        nxt.append(y)
            frontier = nxt

    def identity(self):
        return 0

    def mul(self, x, y):
        return self.table.mul(x, y)

    def inv(self, x):
        return self.table.inv(x)

    def from_word(self, w):
        out = 0
        for s, e in self.presentation.check_word(w).letters:
            g = self.images[s]
            out = self.table.mul(out, g if e > 0 else self.table.inv(g))
        return out

    def to_word(self, x):
        return self._words[x]

    def is_identity(self, x):
        return x == 0

    def subgroup(self, gen_words, names):
        return _FiniteEdgeSubgroup(self, [self.from_word(g) for g in gen_words], names)


class _FiniteEdgeSubgroup:
    """Edge subgroup of a finite vertex: elements with shortlex expressions."""

    def __init__(self, vertex, gens, names):
        T = vertex.table
        self.vertex = vertex
        self.expr = {0: Word()}
        frontier = [0]
        letters = []
        for g, n in zip(gens, names):
            letters += [(g, (n, 1)), (T.inv(g), (n, -1))]
        while frontier:
            nxt = []
            for x in frontier:
                for g, letter in letters:
                    y = T.mul(x, g)
                    if y not in self.expr:
                        if len(self.expr) >= vertex.budget:
                            raise OracleFailure("edge subgroup closure exceeds budget")
                        self.expr[y] = Word(self.expr[x].letters + (letter,))
                        nxt.append(y)
            frontier = nxt
        self.elements = sorted(self.expr)

    def contains(self, x):
        return x in self.expr

    def express(self, x):
        return self.expr.get(x)

    def coset_rep(self, x):
        T = self.vertex.table
        coset = [T.mul(u, x) for u in self.elements]
        rep = min(coset, key=lambda y: (len(self.vertex.to_word(y)), _lex_key(self.vertex, y)))
        u = T.mul(x, T.inv(rep))
        return self.expr[u], rep


def _lex_key(vertex, x):
    pos = {}
    for i, s in enumerate(vertex.presentation.generators):
        pos[(s, 1)], pos[(s, -1)] = 2 * i, 2 * i + 1
    return [pos[l] for l in vertex.to_word(x).letters]


def make_vertex(presentation, realisation=None):
    if realisation is None:
        return FreeVertexGroup(presentation)
    table, images = realisation
    return FiniteVertexGroup(presentation, table, images)


@dataclass
class Edge:
    """An edge group with injections into its endpoint vertex groups.

    For ``kind == 'hnn'`` both endpoints are the same vertex and the stable
    letter ``stable`` conjugates: t^-1 i0(e) t = i1(e).
    """

    kind: str
    source: int
    target: int
    group: Presentation
    inj0: dict
    inj1: dict
    stable: str = None


@dataclass
class GraphOfGroups:
    vertices: list
    edges: list
    realisations: dict = field(default_factory=dict)

    def __post_init__(self):
        self.oracles = [make_vertex(v, self.realisations.get(i)) for i, v in enumerate(self.vertices)]
        self._sub = {}
        for k, e in enumerate(self.edges):
            if e.kind not in ("amalgam", "hnn"):
                raise ValueError("edge kind must be 'amalgam' or 'hnn'")
            if e.kind == "hnn" and e.source != e.target:
                raise ValueError("an HNN loop must start and end at the same vertex")
            names = e.group.generators
            self._sub[(k, 0)] = self.oracles[e.source].subgroup([e.inj0[n] for n in names], names)
            self._sub[(k, 1)] = self.oracles[e.target].subgroup([e.inj1[n] for n in names], names)
        amalg = [e for e in self.edges if e.kind == "amalgam"]
        hnn = [e for e in self.edges if e.kind == "hnn"]
        if amalg and (len(amalg) > 1 or hnn or len(self.vertices) != 2):
            raise ValueError("supported shapes: one amalgam edge, or HNN loops at one vertex")
        if hnn and len(self.vertices) != 1:
            raise ValueError("supported shapes: one amalgam edge, or HNN loops at one vertex")

    @property
    def is_amalgam(self):
        return len(self.vertices) == 2

    def vertex_index(self, tag):
        for i, v in enumerate(self.vertices):
            if v.name == tag:
                return i
        raise KeyError("no vertex named %r" % tag)

    def stable_edge(self, name):
        for k, e in enumerate(self.edges):
            if e.kind == "hnn" and e.stable == name:
                return k, e
        raise KeyError("no stable letter %r" % name)

    def transport(self, k, side, expr):
        """Evaluate an edge-group word on the given side of edge k."""
        e = self.edges[k]
        inj = e.inj0 if side == 0 else e.inj1
        vtx = self.oracles[e.source if side == 0 else e.target]
        return vtx.from_word(expr.substitute({n: word(inj[n]) for n in e.group.generators}))


def free_product(A, B, realisations=None):
    edge = Edge("amalgam", 0, 1, Presentation("1", ()), {}, {})
    return GraphOfGroups([A, B], [edge], realisations or {})


def amalgam(A, B, U, inj_a, inj_b, realisations=None):
    edge = Edge("amalgam", 0, 1, U, dict(inj_a), dict(inj_b))
    return GraphOfGroups([A, B], [edge], realisations or {})


def hnn(H, loops, realisations=None):
    """``loops``: list of (stable letter, edge Presentation, inj_A, inj_B)."""
    edges = [Edge("hnn", 0, 0, E, dict(a), dict(b), t) for t, E, a, b in loops]
    return GraphOfGroups([H], edges, realisations or {})


def fundamental_presentation(gog, name=None):
    """Presentation of pi_1 of the graph of groups.

    Vertex presentations must present their groups (relators included).
    Amalgam edges add i0(e) i1(e)^-1; HNN loops add t^-1 i0(e) t i1(e)^-1.
    """
    gens, rels = [], []
    for v in gog.vertices:
        gens += list(v.generators)
        rels += list(v.relators)
    for e in gog.edges:
        if e.kind == "hnn" and e.stable not in gens:
            gens.append(e.stable)
    if len(set(gens)) != len(gens):
        raise ValueError("vertex generators and stable letters must be distinct symbols")
    for e in gog.edges:
        for n in e.group.generators:
            a, b = word(e.inj0[n]), word(e.inj1[n])
            if e.kind == "amalgam":
                rels.append(a * b.inverse())
            else:
                t = Word.gen(e.stable)
                rels.append(t.inverse() * a * t * b.inverse())
    rels = [r for r in rels if r.free_reduce().letters]
    name = name or "pi1(%s)" % "*".join(v.name for v in gog.vertices)
    return Presentation(name, tuple(gens), tuple(rels))


@dataclass(frozen=True)
class SplicedWord:
    """Alternating syllables: (vertex name, Word) or (stable letter, +-1)."""

    syllables: tuple
    reduced: bool = False

    def __str__(self):
        parts = []
        for tag, val in self.syllables:
            parts.append("%s^%d" % (tag, val) if isinstance(val, int) else "%s[%s]" % (tag, val))
        return " . ".join(parts) if parts else "1"

    def __len__(self):
        return len(self.syllables)


def _to_internal(gog, syllables):
    """Syllables as (vertex index, element) or ('t', name, sign)."""
    out = []
    for tag, val in syllables:
        if isinstance(val, int) and not isinstance(val, bool) and _is_stable(gog, tag):
            if val not in (1, -1):
                out.extend([("t", tag, 1 if val > 0 else -1)] * abs(val))
            else:
                out.append(("t", tag, val))
        else:
            i = gog.vertex_index(tag) if isinstance(tag, str) else tag
            out.append(("v", i, gog.oracles[i].from_word(word(val))))
    return out


def _is_stable(gog, tag):
    return any(e.kind == "hnn" and e.stable == tag for e in gog.edges)


def _merge_vertex(gog, syl):
    """Multiply adjacent syllables of the same vertex and drop identities."""
    out = []
    for s in syl:
        if s[0] == "v":
            if out and out[-1][0] == "v" and out[-1][1] == s[1]:
                o = gog.oracles[s[1]]
                out[-1] = ("v", s[1], o.mul(out[-1][2], s[2]))
            else:
                out.append(s)
            if gog.oracles[out[-1][1]].is_identity(out[-1][2]):
                out.pop()
        else:
            out.append(s)
    return out


def _reduce_amalgam(gog, syl):
    changed = True
    while changed:
        changed = False
        syl = _merge_vertex(gog, syl)
        if len(syl) <= 1:
            break
        for i, (_, v, x) in enumerate(syl):
            side = 0 if v == gog.edges[0].source else 1
            sub = gog._sub[(0, side)]
            if sub.contains(x):
                expr = sub.express(x)
                other = 1 - side
                y = gog.transport(0, other, expr)
                ov = gog.edges[0].target if other == 1 else gog.edges[0].source
                syl = syl[:i] + [("v", ov, y)] + syl[i + 1:]
                changed = True
                break
    return syl


def _canonical_amalgam(gog, syl):
    if not syl:
        return []
    if len(syl) == 1:
        _, v, x = syl[0]
        side = 0 if v == gog.edges[0].source else 1
        sub = gog._sub[(0, side)]
        if side == 1 and sub.contains(x):
            # edge elements are written in the first vertex
            return [("v", gog.edges[0].source, gog.transport(0, 0, sub.express(x)))]
        return syl
    syl = list(syl)
    for i in range(len(syl) - 1, 0, -1):
        _, v, x = syl[i]
        side = 0 if v == gog.edges[0].source else 1
        expr, rep = gog._sub[(0, side)].coset_rep(x)
        syl[i] = ("v", v, rep)
        _, pv, px = syl[i - 1]
        pside = 0 if pv == gog.edges[0].source else 1
        u = gog.transport(0, pside, expr)
        syl[i - 1] = ("v", pv, gog.oracles[pv].mul(px, u))
    return syl


def _reduce_hnn(gog, syl):
    """Remove Britton pinches t^-e g t^e with g in the relevant edge subgroup."""
    changed = True
    while changed:
        changed = False
        syl = _merge_vertex(gog, syl)
        for i in range(len(syl)):
            if syl[i][0] != "t":
                continue
            _, name, e1 = syl[i]
            j = i + 1
            if j < len(syl) and syl[j][0] == "v":
                mid, j2 = syl[j][2], j + 1
            else:
                mid, j2 = gog.oracles[0].identity(), j
            if j2 < len(syl) and syl[j2][0] == "t" and syl[j2][1] == name and syl[j2][2] == -e1:
                k, _ = gog.stable_edge(name)
                # t^-1 a t = phi(a) for a in A (side 0); t b t^-1 = phi^-1(b) for b in B (side 1)
                side = 0 if e1 == -1 else 1
                sub = gog._sub[(k, side)]
                if sub.contains(mid):
                    y = gog.transport(k, 1 - side, sub.express(mid))
                    syl = syl[:i] + [("v", 0, y)] + syl[j2 + 1:]
                    changed = True
                    break
    return syl


def _canonical_hnn(gog, syl):
    """Push edge-subgroup parts leftwards through stable letters."""
    syl = list(syl)
    # ensure vertex syllables between and at both ends for a uniform pass
    full = []
    for s in syl:
        if s[0] == "t" and (not full or full[-1][0] == "t"):
            full.append(("v", 0, gog.oracles[0].identity()))
        full.append(s)
    if full and full[-1][0] == "t":
        full.append(("v", 0, gog.oracles[0].identity()))
    H = gog.oracles[0]
    for i in range(len(full) - 1, 0, -1):
        if full[i][0] != "v" or full[i - 1][0] != "t":
            continue
        _, name, e = full[i - 1]
        k, _ = gog.stable_edge(name)
        # t h = t b r = phi^-1(b) t r  (B side);  t^-1 h = t^-1 a r = phi(a) t^-1 r  (A side)
        side = 1 if e == 1 else 0
        expr, rep = gog._sub[(k, side)].coset_rep(full[i][2])
        full[i] = ("v", 0, rep)
        moved = gog.transport(k, 1 - side, expr)
        _, _, prev = full[i - 2]
        full[i - 2] = ("v", 0, H.mul(prev, moved))
    return [s for s in full if not (s[0] == "v" and H.is_identity(s[2]))]


def splice_normal_form(syllables, gog):
    """Reduced, canonical SplicedWord for the product of ``syllables``.

    Input syllables are (vertex name or index, word) or (stable letter, exponent).
    Amalgams use right coset representatives of the edge subgroup pushed from
    right to left; HNN words are Britton-reduced and then canonicalised the
    same way through each stable letter.
    """
    syl = _to_internal(gog, syllables)
    if gog.is_amalgam:
        syl = _canonical_amalgam(gog, _reduce_amalgam(gog, syl))
    else:
        syl = _canonical_hnn(gog, _reduce_hnn(gog, syl))
    return _export(gog, syl)


def reduce_only(syllables, gog):
    """Reduced (not canonicalised) form: merging, edge absorption, pinches."""
    syl = _to_internal(gog, syllables)
    syl = _reduce_amalgam(gog, syl) if gog.is_amalgam else _reduce_hnn(gog, syl)
    return _export(gog, syl)


def _export(gog, syl):
    out = []
    for s in syl:
        if s[0] == "v":
            out.append((gog.vertices[s[1]].name, gog.oracles[s[1]].to_word(s[2])))
        else:
            out.append((s[1], s[2]))
    return SplicedWord(tuple(out), True)


def is_reduced(w, gog):
    syl = _to_internal(gog, w.syllables)
    if gog.is_amalgam:
        if len(syl) <= 1:
            return True
        for a, b in zip(syl, syl[1:]):
            if a[1] == b[1]:
                return False
        for _, v, x in syl:
            side = 0 if v == gog.edges[0].source else 1
            if gog.oracles[v].is_identity(x) or gog._sub[(0, side)].contains(x):
                return False
        return True
    return len(_reduce_hnn(gog, syl)) == len(_merge_vertex(gog, syl)) and \
        len(_merge_vertex(gog, syl)) == len(syl)


def conjugate_into_factor_criterion(w, gog, factor):
    """Decide whether a reduced word of a free product is conjugate into ``factor``.

    The word is normalised to g_1 d_1 g_2 ... g_n d_n (g_i outside D, d_i in
    D, all non-trivial except perhaps d_n) by rotating a leading D-syllable to
    the end.  Returns a dict with ``conjugate_into_D``, the first violated
    condition as ``obstruction`` and, when conjugate, a ``conjugator`` word
    (as syllables) with conjugator^-1 w conjugator in D.
    """
    if any(e.group.generators for e in gog.edges) or not gog.is_amalgam:
        raise ValueError("criterion applies to free products")
    if not is_reduced(w, gog):
        raise NotReduced("input word is not reduced")
    di = gog.vertex_index(factor)
    D = gog.oracles[di]
    gi = 1 - di
    G = gog.oracles[gi]
    syl = _to_internal(gog, w.syllables)
    dname, gname = gog.vertices[di].name, gog.vertices[gi].name
    if not syl or (len(syl) == 1 and syl[0][1] == di):
        return {"conjugate_into_D": True, "obstruction": None, "conjugator": SplicedWord((), True),
                "target": syl[0][2] if syl else D.identity(), "n": 0}
    pre = []
    if syl[0][1] == di:
        # rotate: d_1^-1 g d_1 moves the leading D-syllable to the end
        d1 = syl[0][2]
        pre = [("v", di, d1)]
        syl = syl[1:]
        if syl[-1][1] == di:
            syl[-1] = ("v", di, D.mul(syl[-1][2], d1))
            if D.is_identity(syl[-1][2]):
                syl.pop()
        else:
            syl.append(("v", di, d1))
    gs, ds = [], []
    for s in syl:
        (gs if s[1] == gi else ds).append(s[2])
    n = len(gs)
    if len(ds) < n:
        ds.append(D.identity())
    obstruction = None
    if n % 2 == 1:
        obstruction = "n odd"
    elif not D.is_identity(ds[n - 1]):
        obstruction = "d_n nontrivial"
    elif any(gs[i] != G.inv(gs[n - 1 - i]) for i in range(n)):
        obstruction = "g_i != g_(n+1-i)^-1"
    elif any(ds[i] != D.inv(ds[n - 2 - i]) for i in range(n - 1) if i + 1 != n // 2):
        obstruction = "d_i != d_(n-i)^-1"
    out = {"conjugate_into_D": obstruction is None, "obstruction": obstruction, "n": n}
    if obstruction is None:
        half = []
        for i in range(n // 2):
            half.append(("v", gi, gs[i]))
            if i < n // 2 - 1:
                half.append(("v", di, ds[i]))
        conj = _export(gog, _merge_vertex(gog, pre + half))
        out["conjugator"] = conj
        out["target"] = ds[n // 2 - 1]
    return out


def double_along(G, L_gens, tag="'"):
    """Presentation of G *_L G with the swap involution.

    Returns (presentation, tau, embeddings) where tau maps each generator to its
    tagged twin (an involution on generators) and the embeddings send G's
    generators to the two copies.
    """
    L_gens = [word(l) for l in L_gens]
    twin = {s: s + tag for s in G.generators}
    gens = tuple(G.generators) + tuple(twin[s] for s in G.generators)
    rel2 = [r.substitute({s: Word.gen(twin[s]) for s in G.generators}) for r in G.relators]
    ident = []
    for l in L_gens:
        lt = l.substitute({s: Word.gen(twin[s]) for s in G.generators})
        r = (l * lt.inverse()).free_reduce()
        if r.letters:
            ident.append(r)
    P = Presentation("D(%s)" % G.name, gens, tuple(G.relators) + tuple(rel2) + tuple(ident))
    tau = {s: twin[s] for s in G.generators}
    tau.update({twin[s]: s for s in G.generators})
    copies = ({s: Word.gen(s) for s in G.generators}, {s: Word.gen(twin[s]) for s in G.generators})
    return P, tau, copies


def apply_generator_map(w, images):
    return word(w).substitute({s: Word.gen(t) if isinstance(t, str) else t for s, t in images.items()})


def p_part_index(v1, v2, p):
    """Index of the lattice spanned by v1, v2 in Z^2 and its p-part."""
    M = [list(v1), list(v2)]
    D, _, _ = smith_normal_form(M)
    d = [D[0][0], D[1][1]]
    if 0 in d:
        raise DegenerateLattice("vectors are linearly dependent")
    full = abs(d[0] * d[1])
    return {"full_index": full, "p_part": p_part(full, p), "invariants": d}


def quotient_index_check(v1, v2, p, k):
    """Index of the subgroup generated by the images of v1, v2 in (Z/p^k)^2 (by enumeration)."""
    if v1[0] * v2[1] - v1[1] * v2[0] == 0:
        raise DegenerateLattice("vectors are linearly dependent")
    q = p ** k
    span = set()
    a = (v1[0] % q, v1[1] % q)
    b = (v2[0] % q, v2[1] % q)
    # subgroup generated by a, b: orders divide q
    for i in range(q):
        x = ((i * a[0]) % q, (i * a[1]) % q)
        for j in range(q):
            span.add(((x[0] + j * b[0]) % q, (x[1] + j * b[1]) % q))
    return (q * q) // len(span)
