# %% [markdown]
# # Exact integer linear algebra
# Everything downstream reduces to Smith normal form over object arrays of Python ints.

# %%
from neron.intlat import FgAbGroup, cokernel_group, intmat, kernel_basis, smith_normal_form

A = intmat([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
U, D, V = smith_normal_form(A)
print(D)
print((U @ A @ V == D).all())

# %% [markdown]
# Cokernels come back as finitely generated abelian groups with invariant factors.

# %%
G, coords = cokernel_group(A)
print(G, G.invariant_factors)
print(kernel_basis(intmat([[1, 1, 1]])).T)

# %%
print(FgAbGroup(1, (2, 6)), FgAbGroup(0, (4,)).order)

# %% [markdown]
# Entries are arbitrary precision, so nothing overflows.

# %%
big = intmat([[2 ** 70, 3], [0, 2 ** 65]])
print(cokernel_group(big)[0])
