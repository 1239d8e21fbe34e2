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
# # Free products, amalgams and reduced forms

# %%
from pwitness.splittings import (conjugate_into_factor_criterion, double_along, free_product, p_part_index,
                                 quotient_index_check, splice_normal_form)
from pwitness.words import free_group, Presentation, word

D = Presentation("D", ("d",), ())
Gp = Presentation("Gp", ("f",), ())
F = free_product(D, Gp)

# %% [markdown]
# ## Normal forms
# Adjacent syllables from the same factor merge; trivial syllables disappear.

# %%
w = splice_normal_form([("Gp", word("f")), ("D", word("d")), ("D", word("d^-1 d^2")), ("Gp", word("f^-1"))], F)
print(w)

# %% [markdown]
# ## Conjugacy into a factor
# Decided from the reduced form alone; when the answer is yes a conjugator is returned.

# %%
for syl in ([("Gp", word("f")), ("D", word("d")), ("Gp", word("f^-1"))],
            [("Gp", word("f")), ("D", word("d"))],
            [("D", word("d")), ("Gp", word("f")), ("D", word("d")), ("Gp", word("f^-1"))]):
    w = splice_normal_form(syl, F)
    out = conjugate_into_factor_criterion(w, F, "D")
    print(w, "->", out["conjugate_into_D"], out["obstruction"], out.get("conjugator"))

# %% [markdown]
# ## Doubling along a subgroup

# %%
P, tau, copies = double_along(free_group(2), ["a^-1 b^-1 a b"])
print(P.generators, [str(r) for r in P.relators])
print(tau)

# %% [markdown]
# ## Lattice index in (Z/p^k)^2
# The index of the image of a rank-2 lattice divides the p-part of its index in Z^2.

# %%
v1, v2 = (4, 6), (-2, 10)
info = p_part_index(v1, v2, 2)
print(info)
print([quotient_index_check(v1, v2, 2, k) for k in (1, 2, 3, 4)])
