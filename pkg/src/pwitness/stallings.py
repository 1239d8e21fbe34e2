"""Folded subgroup graphs for finitely generated subgroups of free groups.

Each edge carries, besides its letter, a label in the free group on the
subgroup generators; the product of labels along a closed path at the base
vertex expresses the element read in terms of those generators.  Folding keeps
this invariant by gauge transformations at the absorbed vertex.
"""

from collections import deque

from .words import Word, word


class FoldedGraph:
    """Stallings graph of H = <gens> in the free group on ``alphabet``.

    ``names`` gives symbols for the subgroup generators used in expressions
    (default ``u0, u1, ...``).
    """

    def __init__(self, gens, alphabet, names=None):
        self.alphabet = tuple(alphabet)
        self.gens = [word(g).free_reduce() for g in gens]
        self.names = tuple(names) if names is not None else tuple("u%d" % i for i in range(len(self.gens)))
        # edge records [src, symbol, dst, label]: reading symbol forward from src
        self._edges = []
        self._nv = 1
        for g, name in zip(self.gens, self.names):
            self._add_loop(g, Word.gen(name))
        self._fold()

    def _add_loop(self, w, label):
        v = 0
        n = len(w.letters)
        for i, (s, e) in enumerate(w.letters):
            nxt = 0 if i == n - 1 else self._nv
            if i < n - 1:
                self._nv += 1
            lab = label if i == 0 else Word()
            if e > 0:
                self._edges.append([v, s, nxt, lab])
            else:
                self._edges.append([nxt, s, v, lab.inverse()])
            v = nxt

    def _collision(self):
        seen = {}
        for i, (src, s, dst, lab) in enumerate(self._edges):
            for key, tgt, mu in (((src, s, 1), dst, lab), ((dst, s, -1), src, lab.inverse())):
                if key in seen:
                    j, tgt_j, mu_j = seen[key]
                    return key[0], (j, tgt_j, mu_j), (i, tgt, mu)
                seen[key] = (i, tgt, mu)
        return None

    def _fold(self):
        while True:
            hit = self._collision()
            if hit is None:
                break
            _, (i1, w1, mu1), (i2, w2, mu2) = hit
            if w1 == w2:
                self._edges.pop(i2)
                continue
            keep, gone, mk, mg, drop = w1, w2, mu1, mu2, i2
            if gone == 0:
                keep, gone, mk, mg, drop = w2, w1, mu2, mu1, i1
            c = mg.inverse() * mk
            ci = c.inverse()
            for rec in self._edges:
                if rec[2] == gone:
                    rec[3] = rec[3] * c
                if rec[0] == gone:
                    rec[3] = ci * rec[3]
            for rec in self._edges:
                if rec[0] == gone:
                    rec[0] = keep
                if rec[2] == gone:
                    rec[2] = keep
            self._edges.pop(drop)
        self.edges = {0: {}}
        for src, s, dst, lab in self._edges:
            self.edges.setdefault(src, {})[(s, 1)] = (dst, lab)
            self.edges.setdefault(dst, {})[(s, -1)] = (src, lab.inverse())
        self.vertices = sorted(self.edges)

    def read(self, w, start=0):
        """Follow w from ``start``. Returns (vertex, label, consumed letter count)."""
        v, label = start, Word()
        letters = word(w).free_reduce().letters
        for i, letter in enumerate(letters):
            nxt = self.edges[v].get(letter)
            if nxt is None:
                return v, label, i
            v, lab = nxt
            label = label * lab
        return v, label, len(letters)

    def contains(self, w):
        v, _, n = self.read(w)
        return n == len(word(w).free_reduce()) and v == 0

    def express(self, w):
        """Word in the subgroup generator names equal to w, or None if w is not in H."""
        w = word(w).free_reduce()
        v, label, n = self.read(w)
        if n != len(w) or v != 0:
            return None
        return label

    def rank(self):
        nedges = sum(len(d) for d in self.edges.values()) // 2
        return nedges - len(self.vertices) + 1

    def index(self):
        """Index of H in the free group if finite (graph is a covering), else None."""
        full = all(len(self.edges[v]) == 2 * len(self.alphabet) for v in self.vertices)
        return len(self.vertices) if full else None

    def _letter_order(self):
        out = []
        for s in self.alphabet:
            out += [(s, 1), (s, -1)]
        return out

    def geodesics(self):
        """Shortlex-least word from the base to each vertex (BFS in letter order)."""
        order = self._letter_order()
        best = {0: Word()}
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for letter in order:
                nxt = self.edges[v].get(letter)
                if nxt is not None and nxt[0] not in best:
                    best[nxt[0]] = Word(best[v].letters + (letter,))
                    queue.append(nxt[0])
        return best

    def coset_rep(self, w):
        """Shortlex-least element of the right coset H w, with w = u * rep and u in H.

        Returns (u_expression, rep) where u_expression is a word in the
        subgroup generator names.
        """
        w = word(w).free_reduce()
        v, _, n = self.read(w)
        suffix = Word(w.letters[n:])
        if not hasattr(self, "_geo"):
            self._geo = self.geodesics()
        rep = self._geo[v] * suffix
        u = w * rep.inverse()
        expr = self.express(u)
        assert expr is not None
        return expr, rep


def subgroup_contains(gens, w, alphabet=None):
    gens = [word(g) for g in gens]
    if alphabet is None:
        syms = set(word(w).symbols())
        for g in gens:
            syms |= g.symbols()
        alphabet = sorted(syms)
    return FoldedGraph(gens, alphabet).contains(w)


def double_coset_contains(h_gens, k_gens, g, alphabet):
    """Decide g in H K for f.g. subgroups H, K of a free group.

    g = h k iff g = alpha beta with alpha read from the base x of the H-graph
    to some v, beta read from some w to the base y of the K-graph, and some
    word c read from v to x and from w to y simultaneously; the last condition
    is reachability of (x, y) from (v, w) in the product graph.
    """
    g = word(g).free_reduce()
    H = FoldedGraph(h_gens, alphabet)
    K = FoldedGraph(k_gens, alphabet)
    back = _reach_pairs(H, K)
    n = len(g.letters)
    for i in range(n + 1):
        v, _, used = H.read(Word(g.letters[:i]))
        if used != i:
            break
        w, _, used2 = K.read(Word(g.letters[i:]).inverse())
        if used2 == n - i and (v, w) in back:
            return True
    return False


def _reach_pairs(H, K):
    """Pairs (v, w) from which some common word leads to (base, base)."""
    seen = {(0, 0)}
    queue = deque([(0, 0)])
    while queue:
        v, w = queue.popleft()
        # predecessors: (v', w') with letter l leading v' -> v and w' -> w
        for letter, (v2, _) in H.edges[v].items():
            s, e = letter
            w2 = K.edges[w].get(letter)
            if w2 is None:
                continue
            pair = (v2, w2[0])
            if pair not in seen:
                seen.add(pair)
                queue.append(pair)
    return seen
