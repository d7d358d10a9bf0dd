# %% [markdown]
# # Tate cohomology of lattices

# %%
from neron.gcoh import lemma21_sequence, tate
from neron.gmod import GModule, close_group, dual_module, induced_module

C2 = close_group([[[-1]]])
triv = GModule.trivial(C2)
sign = GModule(C2, [[[1]], [[-1]]])
reg = induced_module(1, C2)
for name, M in [("trivial", triv), ("sign", sign), ("regular", reg)]:
    print(name, [str(tate(M, r).group) for r in range(-3, 4)])

# %% [markdown]
# Cocycle representatives come with each class; `check()` re-verifies them.

# %%
h = tate(sign, 1)
print(h.group, h.check())

# %% [markdown]
# Degree r of M against degree -r of the dual, on a rank-2 C4 lattice.

# %%
C4 = close_group([[[0, -1], [1, 0]]])
X = GModule(C4, C4.matrices)
print([(str(tate(X, r).group), str(tate(dual_module(X), -r).group)) for r in range(-2, 3)])

# %% [markdown]
# The restriction map from cocharacter invariants to the dual of coinvariants.

# %%
res = lemma21_sequence(sign)
print(res.h1_dual, res.coinv_dual.structure(), res.exact)
