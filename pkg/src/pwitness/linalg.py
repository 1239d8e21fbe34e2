"""Exact integer and F_p linear algebra on small dense matrices.

Everything here works on plain Python ints so results are exact; numpy is
only used by callers for batched work.
"""

from math import gcd

import numpy as np


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def prime_power_exponent(n, p):
    """Return k with n == p**k, or None."""
    if n < 1:
        return None
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k if n == 1 else None


def p_part(n, p):
    n = abs(n)
    q = 1
    while n and n % p == 0:
        n //= p
        q *= p
    return q


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A, B, modulus=None):
    n, m, k = len(A), len(B), len(B[0]) if B else 0
    out = [[sum(A[i][t] * B[t][j] for t in range(m)) for j in range(k)] for i in range(n)]
    if modulus is not None:
        out = [[x % modulus for x in row] for row in out]
    return out


def matpow(A, e, modulus):
    R = identity(len(A))
    B = [[x % modulus for x in row] for row in A]
    while e:
        if e & 1:
            R = matmul(R, B, modulus)
        B = matmul(B, B, modulus)
        e >>= 1
    return R


def rref_mod_p(M, p):
    """Row-reduced echelon form over F_p. Returns (rows, pivot columns)."""
    A = [[x % p for x in row] for row in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [(x * inv) % p for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return A[:r], pivots


def rank_mod_p(M, p):
    if not M:
        return 0
    return len(rref_mod_p(M, p)[1])


def nullspace_mod_p(M, ncols, p):
    """Basis (list of vectors) of {x : M x = 0} over F_p, in a fixed order."""
    if not M:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    R, pivots = rref_mod_p(M, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, pc in zip(R, pivots):
            v[pc] = (-row[f]) % p
        basis.append(v)
    return basis


def in_span_mod_p(vectors, v, p):
    return rank_mod_p(vectors + [v], p) == rank_mod_p(vectors, p) if vectors else not any(x % p for x in v)


def det_mod(A, modulus):
    """Determinant mod ``modulus`` by exact integer Bareiss elimination."""
    n = len(A)
    M = [list(row) for row in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return (sign * M[n - 1][n - 1]) % modulus if n else 1 % modulus


def inverse_mod(A, modulus):
    """Inverse of a square matrix modulo a prime power; ValueError if singular."""
    n = len(A)
    M = [[x % modulus for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        piv = next((i for i in range(c, n) if gcd(M[i][c], modulus) == 1), None)
        if piv is None:
            raise ValueError("matrix is not invertible modulo %d" % modulus)
        M[c], M[piv] = M[piv], M[c]
        inv = pow(M[c][c], -1, modulus)
        M[c] = [(x * inv) % modulus for x in M[c]]
        for i in range(n):
            if i != c and M[i][c]:
                f = M[i][c]
                M[i] = [(x - f * y) % modulus for x, y in zip(M[i], M[c])]
    return [row[n:] for row in M]


def matrix_order_mod(A, modulus, limit=10**6):
    """Multiplicative order of an invertible matrix mod ``modulus``."""
    n = len(A)
    I = identity(n)
    B = [[x % modulus for x in row] for row in A]
    P = B
    for k in range(1, limit + 1):
        if P == I:
            return k
        P = matmul(P, B, modulus)
    raise ValueError("matrix order exceeds limit")


def is_nilpotent_mod_p(A, p):
    n = len(A)
    return all(x == 0 for row in matpow(A, n, p) for x in row) if n else True


def smith_normal_form(A):
    """Smith normal form over Z with transforms.

    Returns ``(D, U, V)`` with ``U @ A @ V == D``, ``U`` and ``V`` unimodular and
    ``D`` diagonal with nonnegative entries d_1 | d_2 | ... .
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [list(map(int, row)) for row in A]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, f):
        D[dst] = [x + f * y for x, y in zip(D[dst], D[src])]
        U[dst] = [x + f * y for x, y in zip(U[dst], U[src])]

    def add_col(src, dst, f):
        for row in D:
            row[dst] += f * row[src]
        for row in V:
            row[dst] += f * row[src]

    t = 0
    while t < min(m, n):
        nz = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    q = D[i][t] // D[t][t]
                    add_row(t, i, -q)
                    if D[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    q = D[t][j] // D[t][t]
                    add_col(t, j, -q)
                    if D[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            # divisibility: fold any entry not divisible by the pivot into row t
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % D[t][t]), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return D, U, V


def snf_diagonal(A):
    D, _, _ = smith_normal_form(A)
    k = min(len(D), len(D[0]) if D else 0)
    return [D[i][i] for i in range(k)]


def batched_matpow_is_zero(M, e, p):
    """For a stack of square matrices ``M`` (B, d, d), test ``M**e == 0 mod p``."""
    B = (M % p).astype(np.int64)
    R = None
    while e:
        if e & 1:
            R = B if R is None else np.matmul(R, B) % p
        e >>= 1
        if e:
            B = np.matmul(B, B) % p
    if R is None:
        return np.zeros(len(M), dtype=bool)
    return ~R.reshape(len(R), -1).any(axis=1)
