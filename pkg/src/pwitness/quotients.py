"""Constructors of finite p-group quotients of finitely presented groups.

Explicit constructions (homology projections, Heisenberg curve maps, Magnus
maps into truncated free algebras) come first; ``hom_search`` is the generic
fallback that enumerates generator images in a family of small p-groups.
"""

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .backends import AbelianBackend, MatrixBackend, PermutationBackend, TruncatedAlgebraBackend
from .linalg import is_prime, smith_normal_form
from .pgroup import (DEFAULT_BUDGET, BudgetExceeded, GroupHom, are_conjugate, closure,
                     conjugacy_class, direct_product, subgroup)
from .words import Presentation, Word, free_group, separating_curve_word, word

MAGNUS_BUDGET = 10 ** 5


class NotPrimitive(ValueError):
    pass


class WrongCurveForm(ValueError):
    pass


class Exhausted(Exception):
    """Budget signal: no quotient found among the targets tried.  ``report`` lists the frontier."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report or {}


def _coerce(G, w):
    return G.check_word(word(w))


# ---------------------------------------------------------------- homology

def homology_coordinates(G):
    """Smith data of H_1(G): (diagonal d_i per coordinate, column basis V).

    Coordinate i of a word w is (exponent vector of w) . V[:, i]; it is
    defined modulo d_i (d_i = 0 means a free coordinate).
    """
    n = G.rank
    R = G.relation_matrix()
    if not R:
        V = [[int(i == j) for j in range(n)] for i in range(n)]
        return [0] * n, V
    D, _, V = smith_normal_form(R)
    diag = [D[i][i] if i < len(D) else 0 for i in range(n)]
    return [abs(d) for d in diag], V


def _coordinate(vec, V, i):
    return sum(v * V[j][i] for j, v in enumerate(vec))


def homology_witness(G, w, p, r=1):
    """Hom G -> Z/p^r under which w has order p^r.

    Uses the first Smith coordinate that maps onto Z/p^r and on which w is a
    unit.  Raises NotPrimitive when no such coordinate exists.
    """
    if not is_prime(p) or r < 1:
        raise ValueError("need p prime and r >= 1")
    w = _coerce(G, w)
    q = p ** r
    diag, V = homology_coordinates(G)
    vec = w.exponent_vector(G.generators)
    for i, d in enumerate(diag):
        if d == 1 or (d != 0 and d % q):
            continue
        if _coordinate(vec, V, i) % p:
            ab = AbelianBackend((q,))
            images = {s: ab.element((V[j][i],)) for j, s in enumerate(G.generators)}
            hom = GroupHom(G, ab, images)
            hom.meta = {"construction": "homology", "coordinate": i,
                        "basis": [V[j][i] for j in range(G.rank)]}
            return hom
    raise NotPrimitive("%s is not p-primitive in H_1 modulo torsion" % w)


def abelian_quotient(G, p, r=1):
    """The universal hom from G onto H_1(G) tensor Z/p^r (all Smith coordinates)."""
    q = p ** r
    diag, V = homology_coordinates(G)
    keep, moduli = [], []
    for i, d in enumerate(diag):
        m = gcd(d, q)
        if m > 1:
            keep.append(i)
            moduli.append(m)
    ab = AbelianBackend(tuple(moduli))
    images = {s: ab.element([V[j][i] for i in keep]) for j, s in enumerate(G.generators)}
    hom = GroupHom(G, ab, images)
    hom.meta = {"construction": "homology", "exponent": q, "coordinates": keep}
    return hom


def coordinate_quotients(G, p, r=1):
    """Homs G -> Z/gcd(d_i, p^r), one per Smith coordinate i that survives mod p."""
    q = p ** r
    diag, V = homology_coordinates(G)
    for i, d in enumerate(diag):
        m = gcd(d, q)
        if m == 1:
            continue
        ab = AbelianBackend((m,))
        images = {s: ab.element((V[j][i],)) for j, s in enumerate(G.generators)}
        hom = GroupHom(G, ab, images)
        hom.meta = {"construction": "homology", "coordinate": i, "exponent": m}
        yield hom


# ---------------------------------------------------------------- Heisenberg

def _genus(G):
    return sum(1 for s in G.generators if s.startswith("a") and s[1:].isdigit())


def heisenberg_witness(G, p, r=1, curve=None):
    """Hom from a surface group to the Heisenberg group mod p^r.

    ``curve`` (default [a1, b1]) must be prod_{i<=g1} [a_i, b_i].  a1 and b1
    go to E+E12 and E+E23; on a closed surface the first handle beyond the
    curve is sent to the swapped pair so that the surface relator holds.  All
    other generators go to the identity; the curve maps to E+E13.
    """
    genus = _genus(G)
    curve = separating_curve_word(1) if curve is None else word(curve).free_reduce()
    g1 = next((k for k in range(1, genus + 1) if separating_curve_word(k) == curve), None)
    if g1 is None:
        raise WrongCurveForm("curve must be prod_{i<=g1} [a_i, b_i] with 1 <= g1 <= genus")
    closed = bool(G.relators)
    if closed and g1 >= genus:
        raise WrongCurveForm("on a closed surface the curve must bound a proper subsurface")
    B = MatrixBackend(3, p ** r)
    X, Y = B.elementary(1, 2), B.elementary(2, 3)
    images = {s: B.identity() for s in G.generators}
    images["a1"], images["b1"] = X, Y
    if closed:
        images["a%d" % (g1 + 1)], images["b%d" % (g1 + 1)] = Y, X
    hom = GroupHom(G, B, images)
    hom.meta = {"construction": "heisenberg", "curve": str(curve), "g1": g1}
    return hom


# ---------------------------------------------------------------- Magnus

class MagnusQuotient:
    """Free group on ``rank`` letters mapped into units of F_p<X>/deg > cls by x_i -> 1 + X_i."""

    def __init__(self, rank, p, cls, budget=MAGNUS_BUDGET, names=None):
        if rank < 1 or cls < 1:
            raise ValueError("need rank >= 1 and class >= 1")
        dim = sum(rank ** d for d in range(cls + 1))
        if dim > budget:
            raise BudgetExceeded("truncated algebra needs %d monomials (budget %d)" % (dim, budget))
        self.backend = TruncatedAlgebraBackend(rank, p, cls)
        self.source = free_group(names if names is not None else rank)
        images = {s: self.backend.generator(i) for i, s in enumerate(self.source.generators)}
        self.hom = GroupHom(self.source, self.backend, images)
        self.hom.meta = {"construction": "magnus", "class": cls}

    def evaluate(self, w):
        return self.hom.evaluate(w)

    __call__ = evaluate

    def subgroup(self, words, budget=DEFAULT_BUDGET):
        return closure([self.evaluate(w) for w in words], self.backend, budget=budget)

    def image_group(self, budget=DEFAULT_BUDGET):
        return self.hom.image_group(budget)


def magnus_quotient(rank, p, cls, budget=MAGNUS_BUDGET, names=None):
    return MagnusQuotient(rank, p, cls, budget, names)


def magnus_hom(G, p, cls, budget=MAGNUS_BUDGET):
    """Magnus map of a free presentation G (generator names kept)."""
    if not G.is_free():
        raise ValueError("Magnus maps are defined here for free presentations only")
    return MagnusQuotient(G.rank, p, cls, budget, names=G.generators).hom


# ---------------------------------------------------------------- target families

def _wreath(p):
    """Z/p wr Z/p acting on p^2 points."""
    B = PermutationBackend(p * p)
    base = B.from_cycles([list(range(p))])
    top = B.from_cycles([[i + p * j for j in range(p)] for i in range(p)])
    return closure([base, top], B, p=p)


@dataclass
class FamilyMember:
    name: str
    order: int
    kind: str
    parts: tuple = ()

    def key(self):
        return (self.order, _KIND_RANK[self.kind], self.name)


_KIND_RANK = {"abelian": 0, "unitriangular": 1, "wreath": 2, "catalog": 3, "product": 4}
FAMILY_KINDS = tuple(_KIND_RANK)


class TargetFamily:
    """Deterministically ordered list of small p-groups used as search targets.

    Kinds: unitriangular (n in {3, 4}, Z/p^r with r <= 3), abelian
    (homocyclic (Z/p^r)^k), wreath (Z/p wr Z/p), product (two-factor direct
    products of the previous kinds), catalog (the order <= p^4 corpus, opt-in).
    Members are sorted by (order, kind, name); ``seed_order`` applies a fixed
    permutation instead.
    """

    def __init__(self, p, kinds=("abelian", "unitriangular", "wreath", "product"),
                 max_order=None, min_order=1, seed_order=None):
        if not is_prime(p):
            raise ValueError("p must be prime")
        if isinstance(kinds, str):
            kinds = ("abelian", "unitriangular", "wreath", "product") if kinds == "all" else \
                tuple(k.strip() for k in kinds.split(","))
        for k in kinds:
            if k not in _KIND_RANK:
                raise ValueError("unknown family kind %r" % k)
        self.p = p
        self.kinds = tuple(kinds)
        self.max_order = max_order or p ** 6
        self.min_order = min_order
        self.seed_order = seed_order
        self._cache = {}

    def describe(self):
        return {"p": self.p, "kinds": list(self.kinds), "max_order": self.max_order,
                "min_order": self.min_order, "seed_order": self.seed_order}

    def _base_members(self):
        p, out = self.p, []
        for r in (1, 2, 3):
            for k in (1, 2, 3, 4):
                out.append(FamilyMember("(Z%d)^%d" % (p ** r, k), p ** (r * k), "abelian", (r, k)))
            for n in (3, 4):
                out.append(FamilyMember("UT%d(Z%d)" % (n, p ** r), p ** (r * n * (n - 1) // 2),
                                        "unitriangular", (n, r)))
        out.append(FamilyMember("Z%dwrZ%d" % (p, p), p ** (p + 1), "wreath", ()))
        if "catalog" in self.kinds and p in (2, 3):
            from .catalog import groups_of_order
            for k in (3, 4):
                for name in groups_of_order(p, k):
                    out.append(FamilyMember("cat:" + name, p ** k, "catalog", (k, name)))
        return out

    def members(self):
        base = [m for m in self._base_members() if m.order <= self.max_order]
        chosen = [m for m in base if m.kind in self.kinds]
        if "product" in self.kinds:
            factors = [m for m in base if m.kind != "catalog"]
            for i, a in enumerate(factors):
                for b in factors[i:]:
                    if a.order * b.order > self.max_order:
                        continue
                    if a.kind == b.kind == "abelian" and a.parts[0] == b.parts[0]:
                        continue
                    chosen.append(FamilyMember("%sx%s" % (a.name, b.name), a.order * b.order,
                                               "product", (a, b)))
        chosen = [m for m in chosen if m.order >= self.min_order]
        chosen.sort(key=FamilyMember.key)
        if self.seed_order is not None:
            perm = np.random.default_rng(self.seed_order).permutation(len(chosen))
            chosen = [chosen[i] for i in perm]
        return chosen

    def group(self, m):
        if m.name not in self._cache:
            self._cache[m.name] = self._build(m)
        return self._cache[m.name]

    def _build(self, m):
        p = self.p
        if m.kind == "abelian":
            r, k = m.parts
            ab = AbelianBackend((p ** r,) * k)
            return closure([ab.unit(i) for i in range(k)], ab)
        if m.kind == "unitriangular":
            n, r = m.parts
            B = MatrixBackend(n, p ** r)
            return closure([B.elementary(i, i + 1) for i in range(1, n)], B)
        if m.kind == "wreath":
            return _wreath(p)
        if m.kind == "catalog":
            from .catalog import groups_of_order
            return groups_of_order(p, m.parts[0])[m.parts[1]]
        a, b = m.parts
        return direct_product(self.group(a), self.group(b))


# ---------------------------------------------------------------- constraints

@dataclass(frozen=True)
class Constraint:
    """One requirement on a candidate hom phi.

    kinds: ``avoid`` (phi(word) not in <phi(words)>), ``not_conjugate``
    (phi(word) not conjugate to any phi(s), s in words), ``not_conjugate_into``
    (phi(word) not conjugate into <phi(words)>), ``order`` (phi(word) has
    order ``value``), ``nontrivial``, ``outside_double_coset`` (phi(word) not
    in <phi(words)> <phi(words2)>).
    """

    kind: str
    word: Word
    words: tuple = ()
    words2: tuple = ()
    value: int = 0

    def describe(self):
        out = {"kind": self.kind, "word": str(self.word)}
        if self.words:
            out["words"] = [str(w) for w in self.words]
        if self.words2:
            out["words2"] = [str(w) for w in self.words2]
        if self.kind == "order":
            out["value"] = self.value
        return out


def _ws(ws):
    return tuple(word(w).free_reduce() for w in ws)


def avoid(w, gens):
    return Constraint("avoid", word(w).free_reduce(), _ws(gens))


def not_conjugate(w, words):
    return Constraint("not_conjugate", word(w).free_reduce(), _ws(words))


def not_conjugate_into(w, gens):
    return Constraint("not_conjugate_into", word(w).free_reduce(), _ws(gens))


def has_order(w, k):
    return Constraint("order", word(w).free_reduce(), value=int(k))


def nontrivial(w):
    return Constraint("nontrivial", word(w).free_reduce())


def outside_double_coset(w, gens1, gens2):
    return Constraint("outside_double_coset", word(w).free_reduce(), _ws(gens1), _ws(gens2))


def constraint_holds(c, hom, Q=None):
    """Check c for a concrete hom using pgroup routines on the image group."""
    if Q is None:
        Q = hom.image_group()
    x = Q.index(hom(c.word))
    imgs = [Q.index(hom(w)) for w in c.words]
    if c.kind == "nontrivial":
        return x != 0
    if c.kind == "order":
        return Q.power(x, c.value) == 0 and all(Q.power(x, c.value // q) != 0
                                                for q in _prime_divisors(c.value))
    if c.kind == "avoid":
        return x not in subgroup(imgs, Q)
    if c.kind == "not_conjugate":
        return not any(are_conjugate(x, y, Q)[0] for y in imgs)
    if c.kind == "not_conjugate_into":
        cls = conjugacy_class(x, Q)
        return not (cls & subgroup(imgs, Q))
    if c.kind == "outside_double_coset":
        S1 = subgroup(imgs, Q)
        S2 = subgroup([Q.index(hom(w)) for w in c.words2], Q)
        return not any(Q.mul(a, b) == x for a in S1 for b in S2)
    raise ValueError("unknown constraint kind %r" % c.kind)


def _prime_divisors(n):
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------- search

def _solve_plan(G, constraints):
    """Split generators into enumerated ones and ones solved from relators.

    A generator occurring exactly once in a relator whose other generators are
    already determined is solved from that relator.  Generators that occur
    nowhere are sent to the identity.
    """
    used = set()
    for r in G.relators:
        used |= r.symbols()
    for c in constraints:
        used |= c.word.symbols()
        for w in c.words + c.words2:
            used |= w.symbols()
    fixed = [s for s in G.generators if s not in used]
    known = set(fixed)
    solved, remaining = [], list(G.relators)
    free = []
    # generators that can be solved: prefer solving the last generator of a relator
    progress = True
    while progress:
        progress = False
        for r in list(remaining):
            syms = r.symbols()
            counts = {s: sum(1 for t, _ in r.letters if t == s) for s in syms}
            cands = [s for s in syms if counts[s] == 1 and s not in known]
            others = [s for s in syms if s not in known and s not in cands]
            if len(cands) == 1 and not others:
                s = cands[0]
                i = next(k for k, (t, _) in enumerate(r.letters) if t == s)
                e = r.letters[i][1]
                A, Bw = Word(r.letters[:i]), Word(r.letters[i + 1:])
                expr = A.inverse() * Bw.inverse() if e > 0 else Bw * A
                solved.append((s, expr))
                known.add(s)
                remaining.remove(r)
                progress = True
        if not progress:
            # enumerate one more generator and retry
            rest = [s for s in G.generators if s not in known]
            if rest:
                free.append(rest[0])
                known.add(rest[0])
                progress = True
    return free, solved, fixed, remaining


class _Vectorized:
    """Table-driven evaluation of words on arrays of candidate images."""

    def __init__(self, Q):
        self.Q = Q
        self.T = Q.table
        self.inv = Q.inverses()
        self.orders = Q.element_orders()
        self.labels = Q.class_labels()
        E = int(self.orders.max()) if Q.order else 1
        P = np.zeros((Q.order, E), dtype=np.int32)
        ar = np.arange(Q.order, dtype=np.int32)
        for k in range(1, E):
            P[:, k] = self.T[P[:, k - 1], ar]
        self.powers = P
        self.exponent = E

    def evaluate(self, w, imgs, n):
        cur = np.zeros(n, dtype=np.int32)
        for s, e in w.letters:
            a = imgs[s] if e > 0 else self.inv[imgs[s]]
            cur = self.T[cur, a]
        return cur

    def in_cyclic(self, x, g):
        return (self.powers[g] == x[:, None]).any(axis=1)


def _vector_filter(c, V, imgs, n):
    """Mask of candidates satisfying c, or None if c needs the per-candidate route."""
    x = V.evaluate(c.word, imgs, n)
    if c.kind == "nontrivial":
        return x != 0
    if c.kind == "order":
        return V.orders[x] == c.value
    ys = [V.evaluate(w, imgs, n) for w in c.words]
    if c.kind == "not_conjugate":
        ok = np.ones(n, dtype=bool)
        for y in ys:
            ok &= V.labels[x] != V.labels[y]
        return ok
    if len(ys) != 1:
        return None
    g = ys[0]
    if c.kind == "avoid":
        return ~V.in_cyclic(x, g)
    if c.kind == "not_conjugate_into":
        return ~(V.labels[V.powers[g]] == V.labels[x][:, None]).any(axis=1)
    if c.kind == "outside_double_coset" and len(c.words2) == 1:
        h = V.evaluate(c.words2[0], imgs, n)
        hit = np.zeros(n, dtype=bool)
        for i in range(V.exponent):
            z = V.T[V.inv[V.powers[g, i]], x]
            hit |= V.in_cyclic(z, h)
        return ~hit
    return None


@dataclass
class SearchResult:
    hom: GroupHom
    target_name: str
    target: object
    candidates: int
    report: dict = field(default_factory=dict)


def hom_search(G, constraints, family, budget=10 ** 7, chunk=1 << 17):
    """First hom (in family enumeration order) satisfying every constraint.

    Candidates are tuples of images of the enumerated generators, in
    lexicographic order of target element indices; solved generators are
    computed from their relator.  The winning candidate is rebuilt as a
    GroupHom (relators re-evaluated) and every constraint is re-checked with
    pgroup routines.  Raises Exhausted when the family or the candidate
    budget runs out.
    """
    constraints = list(constraints)
    free, solved, fixed, remaining = _solve_plan(G, constraints)
    tried, spent = [], 0
    for m in family.members():
        Q = family.group(m)
        V = _Vectorized(Q)
        n = Q.order
        total = n ** len(free)
        done = 0
        found = None
        while done < total:
            if spent >= budget:
                tried.append({"name": m.name, "order": m.order, "candidates": done, "complete": False})
                raise Exhausted("candidate budget %d spent" % budget,
                                {"family": family.describe(), "budget": budget, "tried": tried})
            size = min(chunk, total - done, budget - spent)
            idx = np.arange(done, done + size, dtype=np.int64)
            imgs = {}
            for s in reversed(free):
                imgs[s] = (idx % n).astype(np.int32)
                idx //= n
            for s in fixed:
                imgs[s] = np.zeros(size, dtype=np.int32)
            for s, expr in solved:
                imgs[s] = V.evaluate(expr, imgs, size)
            ok = np.ones(size, dtype=bool)
            for r in remaining:
                ok &= V.evaluate(r, imgs, size) == 0
            slow = []
            for c in constraints:
                if not ok.any():
                    break
                mask = _vector_filter(c, V, imgs, size)
                if mask is None:
                    slow.append(c)
                else:
                    ok &= mask
            for pos in np.flatnonzero(ok):
                images = {s: Q.element(int(imgs[s][pos])) for s in G.generators}
                hom = GroupHom(G, Q.backend, images)
                img = hom.image_group()
                if all(constraint_holds(c, hom, img) for c in slow):
                    found = (hom, done + int(pos) + 1)
                    break
            if found:
                break
            done += size
            spent += size
        if found:
            hom, used = found
            for c in constraints:
                if not constraint_holds(c, hom):
                    raise AssertionError("search candidate failed independent re-check: %s" % c.kind)
            hom.meta = {"construction": "search", "target": m.name}
            tried.append({"name": m.name, "order": m.order, "candidates": used, "complete": False})
            return SearchResult(hom, m.name, Q, spent + used,
                                {"family": family.describe(), "budget": budget, "tried": tried})
        tried.append({"name": m.name, "order": m.order, "candidates": total, "complete": True})
    raise Exhausted("no member of the family admits such a hom",
                    {"family": family.describe(), "budget": budget, "tried": tried})


def extend_hom(G, fixed, Q, budget=10 ** 7, chunk=1 << 17):
    """First hom G -> Q agreeing with ``fixed`` (symbol -> element of Q).

    The remaining generators range over Q in lexicographic index order.
    Returns None when no extension exists; raises Exhausted past ``budget``.
    """
    V = _Vectorized(Q)
    free = [s for s in G.generators if s not in fixed]
    n = Q.order
    total = n ** len(free)
    if total > budget:
        raise Exhausted("extension needs %d candidates (budget %d)" % (total, budget),
                        {"candidates": total, "budget": budget})
    done = 0
    while done < total:
        size = min(chunk, total - done)
        idx = np.arange(done, done + size, dtype=np.int64)
        imgs = {s: np.full(size, Q.index(x), dtype=np.int32) for s, x in fixed.items()}
        for s in reversed(free):
            imgs[s] = (idx % n).astype(np.int32)
            idx //= n
        ok = np.ones(size, dtype=bool)
        for r in G.relators:
            ok &= V.evaluate(r, imgs, size) == 0
        hits = np.flatnonzero(ok)
        if len(hits):
            pos = int(hits[0])
            images = {s: Q.element(int(imgs[s][pos])) for s in G.generators}
            return GroupHom(G, Q.backend, images)
        done += size
    return None
