"""Concrete element representations for finite groups.

A backend multiplies hashable canonical elements and knows how to encode them
as JSON-friendly values.  ``ambient_order`` is set when the whole ambient group
is structurally a finite p-group (unitriangular matrices, abelian p-groups,
units of a truncated algebra); it is ``None`` otherwise and callers must
measure the generated subgroup instead.
"""

import operator
from itertools import product

import numpy as np

from .linalg import inverse_mod, prime_power_exponent


class Backend:
    kind = None
    ambient_order = None
    p = None

    def identity(self):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def power(self, a, k):
        if k < 0:
            a, k = self.inv(a), -k
        r = self.identity()
        while k:
            if k & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            k >>= 1
        return r

    def encode(self, a):
        return list(a)

    def decode(self, obj):
        return tuple(obj)

    def spec(self):
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.spec() == other.spec()

    def __hash__(self):
        return hash(repr(self.spec()))


def _prime_of(modulus):
    for q in range(2, modulus + 1):
        if modulus % q == 0:
            return q
    return None


class MatrixBackend(Backend):
    """n x n matrices modulo ``modulus`` stored row-major as flat tuples."""

    kind = "matrix"

    def __init__(self, n, modulus, shape="unitriangular"):
        if shape not in ("unitriangular", "general"):
            raise ValueError("shape must be 'unitriangular' or 'general'")
        self.n = n
        self.modulus = modulus
        self.shape = shape
        q = _prime_of(modulus)
        if shape == "unitriangular" and q and prime_power_exponent(modulus, q) is not None:
            self.p = q
            self.ambient_order = modulus ** (n * (n - 1) // 2)

    def identity(self):
        n = self.n
        return tuple(int(i == j) for i in range(n) for j in range(n))

    def mul(self, a, b):
        n, m = self.n, self.modulus
        rows = [a[i * n:(i + 1) * n] for i in range(n)]
        cols = [b[j::n] for j in range(n)]
        return tuple(sum(map(operator.mul, r, c)) % m for r in rows for c in cols)

    def inv(self, a):
        rows = [list(a[i * self.n:(i + 1) * self.n]) for i in range(self.n)]
        inv = inverse_mod(rows, self.modulus)
        return tuple(x for row in inv for x in row)

    def element(self, rows):
        flat = tuple(int(x) % self.modulus for row in rows for x in row)
        if len(flat) != self.n * self.n:
            raise ValueError("expected a %dx%d matrix" % (self.n, self.n))
        if self.shape == "unitriangular":
            n = self.n
            for i in range(n):
                for j in range(i + 1):
                    if flat[i * n + j] != int(i == j):
                        raise ValueError("matrix is not upper unitriangular")
        return flat

    def elementary(self, i, j, c=1):
        """I + c E_ij with 1-based indices."""
        e = list(self.identity())
        e[(i - 1) * self.n + (j - 1)] = (e[(i - 1) * self.n + (j - 1)] + c) % self.modulus
        return tuple(e)

    def rows(self, a):
        n = self.n
        return [list(a[i * n:(i + 1) * n]) for i in range(n)]

    def encode(self, a):
        return self.rows(a)

    def decode(self, obj):
        return self.element(obj)

    def spec(self):
        return {"kind": "matrix", "n": self.n, "modulus": self.modulus, "shape": self.shape}


class AbelianBackend(Backend):
    """Direct product of cyclic groups Z/m_1 x ... x Z/m_k, written additively."""

    kind = "abelian"

    def __init__(self, moduli):
        self.moduli = tuple(int(m) for m in moduli)
        order = 1
        for m in self.moduli:
            order *= m
        q = _prime_of(order) if order > 1 else None
        if order == 1 or prime_power_exponent(order, q) is not None:
            self.p = q
            self.ambient_order = order

    def identity(self):
        return (0,) * len(self.moduli)

    def mul(self, a, b):
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def inv(self, a):
        return tuple((-x) % m for x, m in zip(a, self.moduli))

    def element(self, coords):
        return tuple(int(x) % m for x, m in zip(coords, self.moduli))

    def unit(self, i):
        return tuple(int(j == i) % m for j, m in enumerate(self.moduli))

    def decode(self, obj):
        return self.element(obj)

    def spec(self):
        return {"kind": "abelian", "moduli": list(self.moduli)}


class PermutationBackend(Backend):
    """Permutations of {0..degree-1}; products act left to right: i^(ab) = (i^a)^b."""

    kind = "permutation"

    def __init__(self, degree):
        self.degree = degree

    def identity(self):
        return tuple(range(self.degree))

    def mul(self, a, b):
        return tuple(b[i] for i in a)

    def inv(self, a):
        out = [0] * len(a)
        for i, x in enumerate(a):
            out[x] = i
        return tuple(out)

    def from_cycles(self, cycles):
        img = list(range(self.degree))
        for cyc in cycles:
            for i, x in enumerate(cyc):
                img[x] = cyc[(i + 1) % len(cyc)]
        return tuple(img)

    def decode(self, obj):
        a = tuple(int(x) for x in obj)
        if sorted(a) != list(range(self.degree)):
            raise ValueError("not a permutation of degree %d" % self.degree)
        return a

    def spec(self):
        return {"kind": "permutation", "degree": self.degree}


class TruncatedAlgebraBackend(Backend):
    """Units with constant term 1 in F_p<X_1..X_n> modulo monomials of degree > c.

    Elements are flat coefficient tuples over the monomial basis ordered by
    degree, then lexicographically (degree d block has n**d entries).
    """

    kind = "truncated-algebra"

    def __init__(self, rank, p, cls):
        self.rank = rank
        self.p = p
        self.cls = cls
        self.block_sizes = [rank ** d for d in range(cls + 1)]
        self.offsets = np.cumsum([0] + self.block_sizes).tolist()
        self.dim = self.offsets[-1]
        self.ambient_order = p ** (self.dim - 1)

    def blocks(self, a):
        arr = np.asarray(a, dtype=np.int64)
        return [arr[self.offsets[d]:self.offsets[d + 1]] for d in range(self.cls + 1)]

    def mul(self, a, b):
        A, B = self.blocks(a), self.blocks(b)
        out = np.zeros(self.dim, dtype=np.int64)
        for d in range(self.cls + 1):
            acc = out[self.offsets[d]:self.offsets[d + 1]]
            for i in range(d + 1):
                j = d - i
                if A[i].any() and B[j].any():
                    acc += np.outer(A[i], B[j]).ravel()
        return tuple((out % self.p).tolist())

    def identity(self):
        e = [0] * self.dim
        e[0] = 1
        return tuple(e)

    def generator(self, i):
        e = list(self.identity())
        e[1 + i] = 1
        return tuple(e)

    def inv(self, a):
        # (1 + x)^-1 = sum (-x)^k, x nilpotent of degree > cls
        x = list(a)
        x[0] = 0
        neg = tuple((-v) % self.p for v in x)
        term = self.identity()
        total = np.array(self.identity(), dtype=np.int64)
        for _ in range(self.cls):
            term = self.mul(term, neg)
            total += np.asarray(term)
        return tuple((total % self.p).tolist())

    def monomials(self):
        out = []
        for d in range(self.cls + 1):
            out.extend(product(range(self.rank), repeat=d))
        return out

    def terms(self, a):
        """Nonzero (monomial, coefficient) pairs, monomials as index tuples."""
        return [(m, c) for m, c in zip(self.monomials(), a) if c]

    def decode(self, obj):
        a = tuple(int(x) % self.p for x in obj)
        if len(a) != self.dim or a[0] != 1:
            raise ValueError("not a unit with constant term 1")
        return a

    def spec(self):
        return {"kind": "truncated-algebra", "rank": self.rank, "p": self.p, "cls": self.cls}


def backend_from_spec(spec):
    kind = spec["kind"]
    if kind == "matrix":
        return MatrixBackend(spec["n"], spec["modulus"], spec.get("shape", "unitriangular"))
    if kind == "abelian":
        return AbelianBackend(spec["moduli"])
    if kind == "permutation":
        return PermutationBackend(spec["degree"])
    if kind == "truncated-algebra":
        return TruncatedAlgebraBackend(spec["rank"], spec["p"], spec["cls"])
    if kind == "semidirect":
        from .pgroup import SemidirectBackend
        return SemidirectBackend.from_spec(spec)
    if kind == "product":
        from .pgroup import ProductBackend
        return ProductBackend.from_spec(spec)
    raise ValueError("unknown backend kind %r" % kind)
