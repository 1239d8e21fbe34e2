"""A corpus of small p-groups, each built as a concrete closure.

Groups of order p^4 and below are realised as cyclic extensions B.<t> of an
abelian base B: t acts on B by an automorphism and t^m equals a fixed base
element (the wrap).  For p in {2, 3} the corpus covers every isomorphism type
of order <= p^4; ``fingerprint`` separates them.
"""

from collections import Counter
from functools import lru_cache

from .backends import AbelianBackend, MatrixBackend
from .pgroup import (SemidirectBackend, closure, lower_pcentral_series,
                     normal_closure, pcentral_step)


def abelian(*moduli):
    ab = AbelianBackend(moduli)
    return closure([ab.unit(i) for i in range(len(moduli))], ab)


def cyclic_extension(moduli, action, wrap=None, m=None):
    """B.<t> for B = Z/m_1 x ... ; ``action`` lists the images of the unit vectors."""
    B = abelian(*moduli)
    ab = B.backend
    images = [B.index(ab.element(v)) for v in action]
    w = B.index(ab.element(wrap)) if wrap is not None else 0
    S = SemidirectBackend(B, m or B.p, images, w)
    gens = [(g, 0) for g in B.generators] + [(0, 1)]
    return closure(gens, S)


def heisenberg(p, r=1):
    """Upper unitriangular 3x3 matrices mod p^r, generated by E+E12 and E+E23."""
    B = MatrixBackend(3, p ** r)
    return closure([B.elementary(1, 2), B.elementary(2, 3)], B)


def unitriangular(n, modulus):
    B = MatrixBackend(n, modulus)
    gens = [B.elementary(i, i + 1) for i in range(1, n)]
    return closure(gens, B)


_ORDER_16 = {
    "Z16": ((16,), None),
    "Z4xZ4": ((4, 4), None),
    "Z8xZ2": ((8, 2), None),
    "Z4xZ2xZ2": ((4, 2, 2), None),
    "Z2^4": ((2, 2, 2, 2), None),
    "(Z4xZ2):Z2": ((4, 2), ([(1, 1), (0, 1)], None)),
    "Z4:Z4": ((4, 2), ([(3, 0), (0, 1)], (0, 1))),
    "M16": ((8,), ([(5,)], None)),
    "D16": ((8,), ([(7,)], None)),
    "SD16": ((8,), ([(3,)], None)),
    "Q16": ((8,), ([(7,)], (4,))),
    "D8xZ2": ((4, 2), ([(3, 0), (0, 1)], None)),
    "Q8xZ2": ((4, 2), ([(3, 0), (0, 1)], (2, 0))),
    "Pauli": ((4, 2), ([(1, 0), (2, 1)], None)),
}

_ORDER_81 = {
    "Z81": ((27,), ([(1,)], (1,))),
    "Z9xZ9": ((9, 3), ([(1, 0), (0, 1)], (0, 1))),
    "Z27xZ3": ((9, 3), ([(1, 0), (0, 1)], (1, 0))),
    "Z9xZ3xZ3": ((9, 3, 3), None),
    "Z3^4": ((3, 3, 3, 3), None),
    "Heis3xZ3": ((3, 3, 3), ([(1, 0, 0), (0, 1, 0), (1, 0, 1)], None)),
    "M27xZ3": ((9, 3), ([(4, 0), (0, 1)], None)),
    "Heis3oZ9": ((9, 3), ([(1, 0), (3, 1)], None)),
    "M81": ((9, 3), ([(1, 0), (3, 1)], (1, 0))),
    "(Z9xZ3):Z3": ((9, 3), ([(1, 1), (0, 1)], None)),
    "Z9:Z9": ((9, 3), ([(1, 1), (0, 1)], (0, 1))),
    "Z3wrZ3": ((3, 3, 3), ([(1, 0, 0), (0, 0, 1), (1, 2, 2)], None)),
    "maxclass81a": ((9, 3), ([(1, 1), (3, 1)], None)),
    "maxclass81b": ((9, 3), ([(1, 1), (6, 1)], None)),
    "maxclass81c": ((9, 3), ([(1, 1), (6, 1)], (3, 0))),
}


def _build(moduli, ext):
    if ext is None:
        return abelian(*moduli)
    action, wrap = ext
    return cyclic_extension(moduli, action, wrap)


@lru_cache(maxsize=None)
def groups_of_order(p, k):
    """Dict name -> FiniteGroupTable covering the corpus of order p^k (k <= 4)."""
    if k == 0:
        return {"1": abelian()}
    if k == 1:
        return {"Z%d" % p: abelian(p)}
    if k == 2:
        return {"Z%d" % p ** 2: abelian(p * p), "Z%d^2" % p: abelian(p, p)}
    if k == 3:
        out = {
            "Z%d" % p ** 3: abelian(p ** 3),
            "Z%dxZ%d" % (p * p, p): abelian(p * p, p),
            "Z%d^3" % p: abelian(p, p, p),
        }
        if p == 2:
            out["D8"] = cyclic_extension((4,), [(3,)])
            out["Q8"] = cyclic_extension((4,), [(3,)], (2,))
        else:
            out["Heis%d" % p] = cyclic_extension((p, p), [(1, 0), (1, 1)])
            out["M%d" % p ** 3] = cyclic_extension((p * p,), [(1 + p,)])
        return out
    if k == 4 and p == 2:
        return {name: _build(*data) for name, data in _ORDER_16.items()}
    if k == 4 and p == 3:
        return {name: _build(*data) for name, data in _ORDER_81.items()}
    raise ValueError("corpus covers p in {2, 3} up to order p^4 (and any p up to p^3)")


def corpus(p, max_exp=4):
    """List of (name, group) for all corpus groups of order p^k, 1 <= k <= max_exp."""
    out = []
    for k in range(1, max_exp + 1):
        out.extend(groups_of_order(p, k).items())
    return out


def fingerprint(G):
    """Isomorphism invariants, fine enough to separate groups of order <= p^4 for p <= 3."""
    orders = G.element_orders()
    lab = G.class_labels()
    sizes = Counter(lab.tolist())
    full = frozenset(range(G.order))
    derived = normal_closure([G.commutator(a, b) for a in G.generators for b in G.generators], G)
    center = [x for x in range(G.order) if sizes[lab[x]] == 1]
    return (
        G.order,
        tuple(sorted(Counter((int(orders[x]), sizes[lab[x]]) for x in range(G.order)).items())),
        tuple(sorted(Counter(orders[center].tolist()).items())),
        len(derived),
        len(pcentral_step(full, G)) if G.order > 1 else 1,
        tuple(len(t) for t in lower_pcentral_series(G)),
        tuple(sorted(Counter(G.power(x, G.p or 1) for x in range(G.order)).values())),
    )
