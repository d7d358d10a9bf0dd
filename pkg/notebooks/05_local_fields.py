# %% [markdown]
# # Cohomology over a local field with quasi-finite residue field

# %%
from neron.localfield import ResidueFieldMode, local_cohomology
from neron.torus import split_torus, torus_from_generators

qf = ResidueFieldMode()
gm = split_torus()
norm_one = torus_from_generators([[[-1]]], inertia=["g0"], frobenius="1")
for T, name in ((gm, "G_m"), (norm_one, "norm-one")):
    print(name, [str(local_cohomology(T, qf, r).result) for r in (1, 2, 3)])

# %% [markdown]
# Other residue fields: a symbolic answer when nothing more is known, and cd n.

# %%
print(local_cohomology(norm_one, ResidueFieldMode("generic"), 1).result)
cd2 = ResidueFieldMode.parse("cd2")
print(local_cohomology(gm, cd2, 3).result, local_cohomology(gm, cd2, 4).result)
