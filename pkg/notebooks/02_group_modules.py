# %% [markdown]
# # Finite groups acting on lattices
# A group is given by integer generator matrices and closed by breadth-first multiplication.

# %%
from neron.gmod import (GModule, close_group, coinvariants, dual_module, induced_module,
                        invariants, normal_subgroups, subgroups)

rot = [[0, -1], [1, 0]]
C4 = close_group([rot], names=["r"])
X = GModule(C4, C4.matrices)
print(C4.order, [H.order for H in subgroups(C4)])

# %%
print(invariants(X).rank, coinvariants(X).structure())
H = next(h for h in subgroups(C4) if h.order == 2)
print(invariants(X, H).rank, coinvariants(X, H).structure())

# %% [markdown]
# Permutation modules and the contragredient dual.

# %%
s3 = close_group([[[0, 1, 0], [1, 0, 0], [0, 0, 1]], [[0, 0, 1], [1, 0, 0], [0, 1, 0]]])
R = induced_module(1, s3)
print(R.rank, coinvariants(R).structure(), len(normal_subgroups(s3)))
print(dual_module(X).action[1])
