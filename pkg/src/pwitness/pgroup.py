"""Finite p-groups given concretely as closures of generators in a backend.

Elements of a :class:`FiniteGroupTable` are identified with their index in a
breadth-first closure from the identity (generator order fixed), so index 0 is
always the identity and equality of elements is equality of indices.
"""

from collections import deque
from dataclasses import dataclass
from itertools import product
from math import gcd

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .backends import Backend, backend_from_spec
from .linalg import (batched_matpow_is_zero, in_span_mod_p, is_nilpotent_mod_p,
                     prime_power_exponent, rank_mod_p)
from .words import Word, word

DEFAULT_BUDGET = 2 ** 16
TABLE_LIMIT = 4096


class BudgetExceeded(Exception):
    """Closure or search grew past its budget."""


class NotPGroup(ValueError):
    pass


class NotAutomorphism(ValueError):
    pass


class NotHomomorphism(ValueError):
    pass


class FiniteGroupTable:
    def __init__(self, backend, elements, generators, parent, parent_gen, right, p=None):
        self.backend = backend
        self.elements = elements
        self._index = {e: i for i, e in enumerate(elements)}
        self.generators = list(generators)
        self.parent = parent
        self.parent_gen = parent_gen
        self.right = right
        self.p = p
        self._table = None
        self._inv = None
        self._conj = {}
        self._classes = None
        self._orders = None

    def __len__(self):
        return len(self.elements)

    @property
    def order(self):
        return len(self.elements)

    @property
    def identity(self):
        return 0

    def index(self, element):
        try:
            return self._index[element]
        except KeyError:
            raise KeyError("element is not in this group") from None

    def __contains__(self, element):
        return element in self._index

    def element(self, i):
        return self.elements[i]

    def encode(self, i):
        return self.backend.encode(self.elements[i])

    def decode(self, obj):
        return self.index(self.backend.decode(obj))

    @property
    def table(self):
        """Full Cayley table ``table[i, j] = index(e_i * e_j)`` (built on demand)."""
        if self._table is None:
            n = self.order
            if n > TABLE_LIMIT:
                raise BudgetExceeded("Cayley table for order %d exceeds %d" % (n, TABLE_LIMIT))
            T = np.empty((n, n), dtype=np.int32)
            T[:, 0] = np.arange(n)
            for j in range(1, n):
                T[:, j] = self.right[self.parent_gen[j]][T[:, self.parent[j]]]
            self._table = T
        return self._table

    def has_table(self):
        return self._table is not None or self.order <= TABLE_LIMIT

    def mul(self, i, j):
        if self.has_table():
            return int(self.table[i, j])
        return self._index[self.backend.mul(self.elements[i], self.elements[j])]

    def inv(self, i):
        if self._inv is None:
            if self.has_table():
                self._inv = np.argmax(self.table == 0, axis=1)
            else:
                self._inv = np.array([self._index[self.backend.inv(e)] for e in self.elements])
        return int(self._inv[i])

    def inverses(self):
        self.inv(0)
        return self._inv

    def power(self, i, k):
        if k < 0:
            i, k = self.inv(i), -k
        r = 0
        while k:
            if k & 1:
                r = self.mul(r, i)
            i = self.mul(i, i)
            k >>= 1
        return r

    def product(self, indices):
        r = 0
        for i in indices:
            r = self.mul(r, i)
        return r

    def commutator(self, i, j):
        return self.mul(self.mul(self.inv(i), self.inv(j)), self.mul(i, j))

    def conj_by_gen(self, k):
        """Array c with c[x] = g_k^-1 x g_k."""
        if k not in self._conj:
            g = self.generators[k]
            if self.has_table():
                T = self.table
                c = T[T[self.inv(g)], g]
            else:
                ge, gi = self.elements[g], self.backend.inv(self.elements[g])
                mul = self.backend.mul
                c = np.array([self._index[mul(mul(gi, e), ge)] for e in self.elements])
            self._conj[k] = c
        return self._conj[k]

    def conjugate(self, x, by):
        return self.mul(self.mul(self.inv(by), x), by)

    def element_orders(self):
        if self._orders is None:
            self._orders = np.array([element_order(i, self) for i in range(self.order)])
        return self._orders

    def class_labels(self):
        """Conjugacy class label per element: the least index in its class."""
        if self._classes is None:
            n = self.order
            rows, cols = [], []
            for k in range(len(self.generators)):
                rows.append(np.arange(n))
                cols.append(self.conj_by_gen(k))
            if rows:
                r, c = np.concatenate(rows), np.concatenate(cols)
                graph = coo_matrix((np.ones(len(r)), (r, c)), shape=(n, n))
                _, lab = connected_components(graph, directed=True, connection="weak")
            else:
                lab = np.zeros(n, dtype=int)
            first = {}
            for i, l in enumerate(lab):
                first.setdefault(l, i)
            self._classes = np.array([first[l] for l in lab])
        return self._classes

    def is_p_group(self):
        return self.p is not None and prime_power_exponent(self.order, self.p) is not None

    def spec(self):
        return {"backend": self.backend.spec(), "generators": [self.encode(g) for g in self.generators]}

    @classmethod
    def from_spec(cls, spec, budget=DEFAULT_BUDGET):
        backend = backend_from_spec(spec["backend"])
        gens = [backend.decode(g) for g in spec["generators"]]
        return closure(gens, backend, budget=budget)

    def __repr__(self):
        return "<FiniteGroupTable %s order=%d>" % (self.backend.kind, self.order)


def closure(generators, backend, budget=DEFAULT_BUDGET, p=None):
    """Subgroup generated by ``generators`` inside ``backend``.

    Breadth-first from the identity, right-multiplying by generators in the
    order given.  Raises BudgetExceeded past ``budget`` elements and NotPGroup
    when the backend (or ``p``) promises a p-group and the order disagrees.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    gens = list(generators)
    e = backend.identity()
    elements = [e]
    index = {e: 0}
    parent = [-1]
    parent_gen = [-1]
    right = [[] for _ in gens]
    queue_pos = 0
    while queue_pos < len(elements):
        x = elements[queue_pos]
        for k, g in enumerate(gens):
            y = backend.mul(x, g)
            j = index.get(y)
            if j is None:
                j = len(elements)
                if j >= budget:
                    raise BudgetExceeded("closure exceeds budget of %d elements" % budget)
                index[y] = j
                elements.append(y)
                parent.append(queue_pos)
                parent_gen.append(k)
            right[k].append(j)
        queue_pos += 1
    gen_idx = [index[g] for g in gens]
    right = [np.array(r, dtype=np.int64) for r in right]
    q = p or backend.p
    if q is not None and backend.ambient_order is not None or p is not None:
        if prime_power_exponent(len(elements), q) is None:
            raise NotPGroup("closure has order %d, not a power of %d" % (len(elements), q))
    if q is None and len(elements) > 1:
        # infer the prime for p-groups built in non-p backends (permutations, GL)
        for cand in range(2, len(elements) + 1):
            if len(elements) % cand == 0:
                if prime_power_exponent(len(elements), cand) is not None:
                    q = cand
                break
    G = FiniteGroupTable(backend, elements, gen_idx, np.array(parent), np.array(parent_gen),
                         right, p=q)
    return G


def trivial_group(backend):
    return closure([], backend)


def element_order(g, G):
    k, x = 1, g
    while x != 0:
        x = G.mul(x, g)
        k += 1
    return k


def are_conjugate(g, h, G):
    """Return (True, x) with x^-1 g x = h, or (False, None).

    The orbit of g is explored breadth-first by conjugating with generators,
    so the witness is the first one found in that order.
    """
    if g == h:
        return True, 0
    conj = {g: 0}
    queue = deque([g])
    while queue:
        y = queue.popleft()
        for k, gen in enumerate(G.generators):
            z = int(G.conj_by_gen(k)[y])
            if z not in conj:
                conj[z] = G.mul(conj[y], gen)
                if z == h:
                    return True, conj[z]
                queue.append(z)
    return False, None


def conjugacy_class(g, G):
    lab = G.class_labels()
    return frozenset(np.nonzero(lab == lab[g])[0].tolist())


def subgroup(gens, G):
    """Element set of the subgroup generated by ``gens`` (indices)."""
    gens = [g for g in dict.fromkeys(gens) if g != 0]
    seen = {0}
    frontier = [0]
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = G.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    new.append(y)
        frontier = new
    return frozenset(seen)


def subgroup_membership(g, gens, G):
    return g in subgroup(gens, G)


def double_coset(d1_gens, d2_gens, x, G):
    """The set D1 x D2 for D_i = <d_i_gens>."""
    D1 = subgroup(d1_gens, G)
    D2 = subgroup(d2_gens, G)
    return frozenset(G.mul(G.mul(a, x), b) for a in D1 for b in D2)


def double_coset_contains(d1_gens, d2_gens, x, t, G):
    return t in double_coset(d1_gens, d2_gens, x, G)


def normal_closure(gens, G):
    gens = list(gens)
    S = subgroup(gens, G)
    while True:
        missing = set()
        for k in range(len(G.generators)):
            c = G.conj_by_gen(k)
            missing.update(int(c[x]) for x in S if int(c[x]) not in S)
        if not missing:
            return S
        gens.append(min(missing))
        S = subgroup(gens, G)


def is_normal(S, G):
    return all(int(G.conj_by_gen(k)[x]) in S for k in range(len(G.generators)) for x in S)


def pcentral_step(N, G):
    """[N, G] N^p for a normal subgroup N of the p-group G."""
    p = G.p
    gens = set()
    for x in N:
        gens.add(G.power(x, p))
        for g in G.generators:
            gens.add(G.commutator(x, g))
    gens.discard(0)
    return normal_closure(sorted(gens), G)


def lower_pcentral_series(G):
    series = [frozenset(range(G.order))]
    while len(series[-1]) > 1:
        series.append(pcentral_step(series[-1], G))
        if series[-1] == series[-2]:
            raise NotPGroup("lower p-central series does not terminate")
    return series


@dataclass
class Section:
    """Elementary abelian section N/M with a chosen basis and F_p coordinates."""

    N: frozenset
    M: frozenset
    basis: list
    coords: dict
    p: int

    @property
    def dim(self):
        return len(self.basis)

    def preimage(self, vectors, G):
        """Subgroup of N lying over the span of ``vectors``."""
        if not vectors:
            return self.M
        return frozenset(x for x in self.N if in_span_mod_p(list(vectors), list(self.coords[x]), self.p))


def section(N, M, G, candidates=None):
    p = G.p
    basis = []
    current = set(M)
    for x in (candidates if candidates is not None else sorted(N)):
        if x not in current:
            basis.append(x)
            current = set(subgroup(sorted(M) + basis, G)) if len(M) < 64 else \
                set(subgroup(_subgroup_gens(M, G) + basis, G))
        if len(current) == len(N):
            break
    coords = {}
    Ml = sorted(M)
    for c in product(range(p), repeat=len(basis)):
        e = 0
        for b, k in zip(basis, c):
            e = G.mul(e, G.power(b, k))
        for m in Ml:
            coords[G.mul(e, m)] = c
    if len(coords) != len(N):
        raise NotPGroup("section is not elementary abelian")
    return Section(frozenset(N), frozenset(M), basis, coords, p)


def _subgroup_gens(S, G):
    """A small generating set of the subgroup S (greedy in index order)."""
    gens, current = [], {0}
    for x in sorted(S):
        if x not in current:
            gens.append(x)
            current = set(subgroup(gens, G))
            if len(current) == len(S):
                break
    return gens


class TableHom:
    """Homomorphism between finite groups given by images of source generators."""

    def __init__(self, source, target, images):
        self.source = source
        self.target = target
        self.images = [int(i) for i in images]
        if len(self.images) != len(source.generators):
            raise ValueError("need one image per source generator")
        m = np.zeros(source.order, dtype=np.int64)
        for x in range(1, source.order):
            m[x] = target.mul(int(m[source.parent[x]]), self.images[source.parent_gen[x]])
        self.map = m
        for k, img in enumerate(self.images):
            R = source.right[k]
            for x in range(source.order):
                if target.mul(int(m[x]), img) != m[R[x]]:
                    raise NotHomomorphism("generator images do not define a homomorphism")

    def __call__(self, x):
        return int(self.map[x])

    def kernel(self):
        return frozenset(np.nonzero(self.map == 0)[0].tolist())

    def image(self):
        return frozenset(self.map.tolist())

    def is_bijective(self):
        return self.source.order == self.target.order and len(set(self.map.tolist())) == self.target.order


@dataclass
class H1Data:
    target: FiniteGroupTable
    projection: TableHom
    basis: list
    coords: np.ndarray
    frattini: frozenset

    @property
    def dim(self):
        return len(self.basis)


def h1_mod_p(P):
    """H_1(P; Z/p) = P / P^p[P,P] with its projection.

    The basis is chosen greedily from ``P.generators`` in order.
    """
    if not P.is_p_group() and P.order > 1:
        raise NotPGroup("h1_mod_p needs a p-group")
    p = P.p
    full = frozenset(range(P.order))
    frattini = pcentral_step(full, P) if P.order > 1 else full
    sec = section(full, frattini, P, candidates=list(P.generators) + list(range(P.order)))
    d = sec.dim
    from .backends import AbelianBackend
    ab = AbelianBackend((p,) * d) if d else AbelianBackend(())
    target = closure([ab.unit(i) for i in range(d)], ab)
    coords = np.array([sec.coords[x] for x in range(P.order)], dtype=np.int64).reshape(P.order, d)
    images = [target.index(ab.element(coords[g])) for g in P.generators]
    proj = TableHom(P, target, images)
    return H1Data(target, proj, sec.basis, coords, frattini)


@dataclass
class ChiefSeries:
    terms: list

    def check(self, P):
        """Raise ValueError unless this is a chief series of P with factors Z/p."""
        if self.terms[0] != frozenset(range(P.order)) or self.terms[-1] != frozenset({0}):
            raise ValueError("series must run from P down to 1")
        for a, b in zip(self.terms, self.terms[1:]):
            if not b < a or len(a) != P.p * len(b):
                raise ValueError("successive quotient is not of order p")
            if not is_normal(b, P):
                raise ValueError("term is not normal in P")
        return True

    def __len__(self):
        return len(self.terms)


def _invariant_flag(sec, P):
    """Subgroups M = S_0 < S_1 < ... < S_d = N through fixed vectors, lex order."""
    p, d = sec.p, sec.dim
    actions = []
    for k in range(len(P.generators)):
        c = P.conj_by_gen(k)
        actions.append([list(sec.coords[int(c[b])]) for b in sec.basis])  # images of basis
    flag = [sec.M]
    W = []
    for _ in range(d):
        for v in product(range(p), repeat=d):
            v = list(v)
            if not any(v) or (W and in_span_mod_p(W, v, p)):
                continue
            ok = True
            for A in actions:
                img = [sum(v[j] * A[j][i] for j in range(d)) % p for i in range(d)]
                diff = [(a - b) % p for a, b in zip(img, v)]
                if any(diff) and not (W and in_span_mod_p(W, diff, p)):
                    ok = False
                    break
            if ok:
                W.append(v)
                break
        else:
            raise NotPGroup("no fixed vector in a p-group module section")
        flag.append(sec.preimage(W, P))
    return flag


def chief_series(P):
    """Deterministic chief series refining the lower exponent-p central series."""
    if P.order == 1:
        return ChiefSeries([frozenset({0})])
    if not P.is_p_group():
        raise NotPGroup("chief_series needs a p-group")
    lcs = lower_pcentral_series(P)
    terms = [lcs[0]]
    for i, (N, M) in enumerate(zip(lcs, lcs[1:])):
        cand = list(P.generators) + sorted(N) if i == 0 else None
        sec = section(N, M, P, candidates=cand)
        flag = _invariant_flag(sec, P)  # ascending M .. N
        terms.extend(reversed(flag[:-1]))
    return ChiefSeries(terms)


def maximal_normal_below(N, P):
    """Normal subgroups M of P inside N with |N : M| = p (all such)."""
    if len(N) == 1:
        return []
    M0 = pcentral_step(N, P)
    sec = section(N, M0, P)
    p, d = sec.p, sec.dim
    out = []
    for f in product(range(p), repeat=d):
        if not any(f) or next(x for x in f if x) != 1:
            continue
        out.append(frozenset(x for x in N if sum(a * b for a, b in zip(f, sec.coords[x])) % p == 0))
    return out


def all_chief_series(P):
    """Every chief series of P (as lists of terms), in a deterministic order."""
    memo = {}

    def chains(N):
        if N in memo:
            return memo[N]
        if len(N) == 1:
            res = [[N]]
        else:
            res = [[N] + c for M in maximal_normal_below(N, P) for c in chains(M)]
        memo[N] = res
        return res

    return [ChiefSeries(c) for c in chains(frozenset(range(P.order)))]


def normal_subgroups(P):
    """All normal subgroups of the p-group P (every one lies on some chief series)."""
    seen = {frozenset(range(P.order))}
    stack = [frozenset(range(P.order))]
    while stack:
        N = stack.pop()
        for M in maximal_normal_below(N, P):
            if M not in seen:
                seen.add(M)
                stack.append(M)
    return seen


def extend_endomorphism(images, P):
    """Extend generator images to an endomorphism array of P, or raise NotAutomorphism."""
    try:
        return TableHom(P, P, images).map
    except NotHomomorphism as exc:
        raise NotAutomorphism(str(exc)) from None


def _checked_automorphism(images, P):
    m = extend_endomorphism(images, P)
    if len(set(m.tolist())) != P.order:
        raise NotAutomorphism("map is not bijective")
    return m


def induced_h1_matrix(images, P, h1=None):
    """Matrix over F_p of the map induced on H_1(P; Z/p).

    Column j holds the coordinates of the image of the j-th basis vector of
    ``h1_mod_p(P)``.
    """
    m = _checked_automorphism(images, P)
    h1 = h1 or h1_mod_p(P)
    d = h1.dim
    return [[int(h1.coords[m[b]][i]) for b in h1.basis] for i in range(d)]


def unipotent_order_check(images, P, h1=None):
    """Report whether psi acts unipotently on H_1(P; F_p) and the order of psi."""
    m = _checked_automorphism(images, P)
    h1 = h1 or h1_mod_p(P)
    M = induced_h1_matrix(images, P, h1)
    d, p = len(M), P.p
    shifted = [[(M[i][j] - (i == j)) % p for j in range(d)] for i in range(d)]
    unipotent = is_nilpotent_mod_p(shifted, p)
    gens = list(P.generators)
    cur = [int(m[g]) for g in gens]
    k = 1
    while cur != gens:
        cur = [int(m[c]) for c in cur]
        k += 1
    return {"unipotent": bool(unipotent), "order": k,
            "order_is_p_power": prime_power_exponent(k, p) is not None}


def _gl_columns(p, d):
    """All invertible d x d matrices over F_p as arrays of column codes, chunked."""
    q = p ** d
    digits = np.array(list(product(range(p), repeat=d)), dtype=np.int64)  # code -> digits
    weights = p ** np.arange(d - 1, -1, -1)

    def extend(prefix):
        j = prefix.shape[1]
        coeffs = np.array(list(product(range(p), repeat=j)), dtype=np.int64)  # (p^j, j)
        cols = digits[prefix]  # (N, j, d)
        span = np.einsum("sj,njd->nsd", coeffs, cols) % p
        span_codes = span @ weights  # (N, p^j)
        mask = np.ones((len(prefix), q), dtype=bool)
        rows = np.repeat(np.arange(len(prefix)), span_codes.shape[1])
        mask[rows, span_codes.ravel()] = False
        r, c = np.nonzero(mask)
        return np.concatenate([prefix[r], c[:, None]], axis=1)

    for first in range(1, q):
        pre = np.array([[first]], dtype=np.int64)
        for _ in range(d - 1):
            pre = extend(pre)
        yield pre


def automorphism_reports(P, batch=200000):
    """Exhaustively enumerate Aut(P) and yield per-batch report arrays.

    Yields dicts with arrays ``images`` (images of the H_1 basis elements),
    ``unipotent``, ``order``.  Candidates are tuples whose images form a basis
    of H_1 (Burnside), so every homomorphism found is an automorphism.
    """
    h1 = h1_mod_p(P)
    p, d, n = P.p, h1.dim, P.order
    if d == 0:
        yield {"images": np.zeros((1, 0), dtype=np.int64), "unipotent": np.array([True]),
               "order": np.array([1]), "psi": np.zeros((1, 1), dtype=np.int64)}
        return
    T = P.table.astype(np.int64)
    Tf = P.table.astype(np.int32).ravel()
    basis = list(h1.basis)
    # BFS tree over the basis
    parent = np.full(n, -1)
    pgen = np.full(n, -1)
    order_list = [0]
    seen = {0}
    for x in order_list:
        for k, b in enumerate(basis):
            y = int(T[x, b])
            if y not in seen:
                seen.add(y)
                parent[y], pgen[y] = x, k
                order_list.append(y)
    R = [T[:, b] for b in basis]
    weights = p ** np.arange(d - 1, -1, -1)
    codes = h1.coords @ weights
    cosets = [np.nonzero(codes == c)[0] for c in range(p ** d)]
    fsize = len(cosets[0])
    lift = np.array(list(product(range(fsize), repeat=d)), dtype=np.int64)  # (fsize^d, d)
    coset_arr = np.stack(cosets)  # (p^d, fsize)

    def process(cols):
        # cols: (B, d) column codes; expand lifts; psi is stored column-major (n, B)
        B = len(cols)
        imgs = coset_arr[cols[:, None, :], lift[None, :, :]].reshape(B * len(lift), d)
        imgs_t = np.ascontiguousarray(imgs.T)
        psi = np.zeros((n, len(imgs)), dtype=np.int32)
        for x in order_list[1:]:
            psi[x] = Tf[psi[parent[x]] * n + imgs_t[pgen[x]]]
        ok = np.ones(len(imgs), dtype=bool)
        for k in range(d):
            ok &= (Tf[psi * n + imgs_t[k]] == psi[R[k]]).all(axis=0)
        imgs, psi = imgs[ok], psi[:, ok]
        if not len(imgs):
            return None
        M = np.transpose(h1.coords[imgs], (0, 2, 1))  # column j = coords of image j
        shifted = (M - np.eye(d, dtype=np.int64)) % p
        unip = batched_matpow_is_zero(shifted, d, p)
        A = len(imgs)
        flat = psi.ravel()
        target = np.array(basis)[:, None]
        order = np.zeros(A, dtype=np.int64)
        active = np.arange(A)
        cur = np.ascontiguousarray(imgs.T)  # (d, A)
        k = 1
        while len(active):
            done = (cur == target).all(axis=0)
            if done.any():
                order[active[done]] = k
                keep = ~done
                active, cur = active[keep], cur[:, keep]
            cur = flat[cur * A + active]
            k += 1
        return {"images": imgs, "unipotent": unip, "order": order, "psi": psi.T}

    buf, size = [], 0
    step = max(1, batch // len(lift))
    for chunk in _gl_columns(p, d):
        for s in range(0, len(chunk), step):
            part = chunk[s:s + step]
            buf.append(part)
            size += len(part)
            if size >= step:
                out = process(np.concatenate(buf))
                buf, size = [], 0
                if out is not None:
                    yield out
    if buf:
        out = process(np.concatenate(buf))
        if out is not None:
            yield out


class SemidirectBackend(Backend):
    """Cyclic extension of a finite base group: elements (b, i) = b t^i, 0 <= i < m.

    ``t`` acts by the automorphism alpha (t b t^-1 = alpha(b)) and t^m = wrap.
    With wrap = 1 this is the semidirect product base x| Z/m.
    """

    kind = "semidirect"

    def __init__(self, base, m, action_images, wrap=0):
        self.base = base
        self.m = m
        self.action_images = [int(x) for x in action_images]
        self.wrap = int(wrap)
        alpha = _checked_automorphism(self.action_images, base)
        pows = [np.arange(base.order)]
        for _ in range(m):
            pows.append(alpha[pows[-1]])
        w = self.wrap
        if int(alpha[w]) != w:
            raise ValueError("wrap element must be fixed by the action")
        inner = np.array([base.mul(base.mul(w, x), base.inv(w)) for x in range(base.order)])
        if not np.array_equal(pows[m], inner):
            raise ValueError("action^m must be conjugation by the wrap element")
        self.alpha_pows = pows[:m]
        if base.p is not None and prime_power_exponent(m, base.p) is not None and base.is_p_group():
            self.p = base.p
            self.ambient_order = base.order * m

    def identity(self):
        return (0, 0)

    def mul(self, a, b):
        (x, i), (y, j) = a, b
        B = self.base
        z = B.mul(x, int(self.alpha_pows[i][y]))
        s = i + j
        if s >= self.m:
            z = B.mul(z, self.wrap)
            s -= self.m
        return (z, s)

    def inv(self, a):
        x, i = a
        r = self.identity()
        # (x t^i)^-1 computed by powering: order divides |base| * m
        k = self.base.order * self.m
        return self.power(a, k - 1)

    def encode(self, a):
        return [self.base.encode(a[0]), a[1]]

    def decode(self, obj):
        i = int(obj[1])
        if not 0 <= i < self.m:
            raise ValueError("exponent out of range")
        return (self.base.decode(obj[0]), i)

    def spec(self):
        return {"kind": "semidirect", "base": self.base.spec(), "m": self.m,
                "action": [self.base.encode(x) for x in self.action_images],
                "wrap": self.base.encode(self.wrap)}

    @classmethod
    def from_spec(cls, spec):
        base = FiniteGroupTable.from_spec(spec["base"])
        action = [base.decode(x) for x in spec["action"]]
        return cls(base, int(spec["m"]), action, base.decode(spec["wrap"]))


class RelatorFailure(ValueError):
    pass


class GroupHom:
    """Homomorphism from a finitely presented group into a backend group.

    ``images`` maps each source generator symbol to a backend element.  The
    constructor evaluates every relator and keeps the transcript; a relator
    that does not evaluate to the identity raises RelatorFailure.
    """

    def __init__(self, source, backend, images, check=True):
        self.source = source
        self.backend = backend
        if isinstance(images, dict):
            self.images = {s: images[s] for s in source.generators}
        else:
            self.images = dict(zip(source.generators, images))
        if len(self.images) != len(source.generators):
            raise ValueError("need one image per generator")
        self._inv = {s: backend.inv(x) for s, x in self.images.items()}
        self.transcript = [(str(r), self.evaluate(r)) for r in source.relators]
        if check:
            for r, val in self.transcript:
                if val != backend.identity():
                    raise RelatorFailure("relator %s does not map to the identity" % r)

    def evaluate(self, w):
        w = word(w)
        out = self.backend.identity()
        for s, e in w.letters:
            out = self.backend.mul(out, self.images[s] if e > 0 else self._inv[s])
        return out

    __call__ = evaluate

    def image_group(self, budget=DEFAULT_BUDGET):
        return closure([self.images[s] for s in self.source.generators], self.backend, budget=budget)

    def to_dict(self):
        return {
            "source": self.source.to_dict(),
            "target": self.backend.spec(),
            "images": {s: self.backend.encode(x) for s, x in self.images.items()},
        }

    @classmethod
    def from_dict(cls, d, check=True):
        from .words import Presentation
        source = Presentation.from_dict(d["source"])
        backend = backend_from_spec(d["target"])
        images = {s: backend.decode(v) for s, v in d["images"].items()}
        return cls(source, backend, images, check=check)


class ProductBackend(Backend):
    """Direct product of finite groups; elements are tuples of factor indices."""

    kind = "product"

    def __init__(self, factors):
        self.factors = list(factors)
        primes = {f.p for f in self.factors if f.order > 1}
        if len(primes) == 1 and all(f.is_p_group() or f.order == 1 for f in self.factors):
            self.p = primes.pop()
            order = 1
            for f in self.factors:
                order *= f.order
            self.ambient_order = order

    def identity(self):
        return (0,) * len(self.factors)

    def mul(self, a, b):
        return tuple(f.mul(x, y) for f, x, y in zip(self.factors, a, b))

    def inv(self, a):
        return tuple(f.inv(x) for f, x in zip(self.factors, a))

    def encode(self, a):
        return [f.encode(x) for f, x in zip(self.factors, a)]

    def decode(self, obj):
        if len(obj) != len(self.factors):
            raise ValueError("wrong number of product coordinates")
        return tuple(f.decode(x) for f, x in zip(self.factors, obj))

    def spec(self):
        return {"kind": "product", "factors": [f.spec() for f in self.factors]}

    @classmethod
    def from_spec(cls, spec):
        return cls([FiniteGroupTable.from_spec(f) for f in spec["factors"]])


def direct_product(*groups):
    """Closure of the direct product, generated by the factors' generators."""
    B = ProductBackend(groups)
    gens = []
    for i, G in enumerate(groups):
        for g in G.generators:
            e = [0] * len(groups)
            e[i] = g
            gens.append(tuple(e))
    return closure(gens, B)
