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
# # Building finite p-group quotients

# %%
import numpy as np

from pwitness.pgroup import element_order
from pwitness.quotients import (TargetFamily, hom_search, heisenberg_witness, homology_witness, magnus_quotient,
                                not_conjugate_into)
from pwitness.words import free_group, separating_curve_word, surface_presentation

# %% [markdown]
# ## Separating curves in a Heisenberg quotient
# The boundary of a genus-1 subsurface maps to the central elementary matrix, of order p^r.

# %%
S = surface_presentation(1, 1)
for p, r in [(2, 1), (2, 3), (3, 2)]:
    hom = heisenberg_witness(S, p, r)
    img = hom(separating_curve_word(1))
    P = hom.image_group()
    print(p, r, np.array(hom.backend.rows(img)).tolist(), "order", element_order(P.index(img), P))

# %% [markdown]
# ## Homology witnesses

# %%
F = free_group(["l", "f"])
hom = homology_witness(F, "f", 2)
print(hom("f"), hom("l"))

# %% [markdown]
# ## Truncated Magnus expansion
# Words in the free group embed in units of F_p<<X>> modulo degree > c; the
# commutator [a, b] first appears at class 2.

# %%
for c in (1, 2, 3):
    M = magnus_quotient(2, 3, c)
    print(c, M("a^-1 b^-1 a b") != M.backend.identity())

# %% [markdown]
# ## Constraint search over a family of small p-groups

# %%
fam = TargetFamily(2, "all", max_order=64)
res = hom_search(F, [not_conjugate_into("l f l^-1", ["l"])], fam)
print(res.target_name, res.candidates, "candidates")
