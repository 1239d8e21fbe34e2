import numpy as np
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from pwitness.linalg import (det_mod, inverse_mod, is_nilpotent_mod_p, is_prime, matrix_order_mod,
                             matpow, p_part, prime_power_exponent, rank_mod_p, smith_normal_form)

small = st.integers(-20, 20)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_smith_form_matches_sympy(m, n, data):
    A = [[data.draw(small) for _ in range(n)] for _ in range(m)]
    D, U, V = smith_normal_form(A)
    assert Matrix(U) * Matrix(A) * Matrix(V) == Matrix(D)
    assert abs(Matrix(U).det()) == 1
    assert abs(Matrix(V).det()) == 1
    diag = [D[i][i] for i in range(min(m, n))]
    ref = sympy_snf(Matrix(A), domain=ZZ)
    ref_diag = [abs(int(ref[i, i])) for i in range(min(m, n))]
    assert sorted(diag) == sorted(ref_diag)
    nz = [d for d in diag if d]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


def test_primes_and_parts():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert prime_power_exponent(27, 3) == 3
    assert prime_power_exponent(12, 2) is None
    assert p_part(24, 2) == 8 and p_part(24, 3) == 3


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(1, 3), st.data())
def test_inverse_and_det_mod(p, n, data):
    A = [[data.draw(st.integers(0, p - 1)) for _ in range(n)] for _ in range(n)]
    d = det_mod(A, p)
    assert d == int(Matrix(A).det()) % p
    if d:
        B = inverse_mod(A, p)
        assert ((np.array(A) @ np.array(B)) % p == np.eye(n, dtype=int)).all()
    assert rank_mod_p(A, p) == (n if d else rank_mod_p(A, p))


def test_matrix_order_and_nilpotence():
    assert matrix_order_mod([[1, 1], [0, 1]], 2) == 2
    assert matrix_order_mod([[1, 1], [0, 1]], 9) == 9
    assert matpow([[1, 1], [0, 1]], 3, 3) == [[1, 0], [0, 1]]
    assert is_nilpotent_mod_p([[0, 1], [0, 0]], 5)
    assert not is_nilpotent_mod_p([[0, 1], [1, 0]], 3)
