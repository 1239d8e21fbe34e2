# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
#       format_version: '1.3'
# ---

# %% [markdown]
# # Finite p-groups as multiplication tables
#
# Groups are closures of a few generators inside a backend (unitriangular
# matrices, abelian tuples, permutations).  Index 0 is always the identity.

# %%
from pwitness import catalog
from pwitness.backends import MatrixBackend
from pwitness.pgroup import (are_conjugate, chief_series, closure, conjugacy_class, h1_mod_p,
                             unipotent_order_check)

B = MatrixBackend(3, 3)
H = closure([B.elementary(1, 2), B.elementary(2, 3)], B)
print("order", H.order, "p =", H.p)
print("element orders", sorted(set(H.element_orders().tolist())))

# %% [markdown]
# ## Chief series and conjugacy
# Every term is normal and consecutive quotients have order p.

# %%
series = chief_series(H)
print([len(t) for t in series.terms])
x, y = H.generators
ok, w = are_conjugate(x, H.mul(x, H.commutator(x, y)), H)
print("x ~ x[x,y]:", ok, "witness index", w)
print("class size of x:", len(conjugacy_class(x, H)))

# %% [markdown]
# ## Automorphisms acting on H_1
# An automorphism is given by the images of the generators.  The transvection
# x -> x, y -> y x is unipotent on H_1(H; F_3), so its order is a power of 3.

# %%
h1 = h1_mod_p(H)
print("H_1 dimension", h1.dim)
print(unipotent_order_check([x, H.mul(y, x)], H))
print(unipotent_order_check([y, x], H))

# %% [markdown]
# ## The small-group corpus
# Groups of order p^k for k <= 4 (p = 2, 3) built as cyclic extensions.

# %%
for p in (2, 3):
    names = [name for name, _ in catalog.corpus(p, 4)]
    print(p, len(names), names[:6])
