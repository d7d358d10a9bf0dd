# %% [markdown]
# # Reductive groups through the algebraic fundamental group

# %%
from neron.gmod import whole
from neron.localfield import ResidueFieldMode
from neron.reductive import (abelian_cohomology, gl, h1_reductive, pgl, pi1, quasi_split_pu3,
                             sl)

qf = ResidueFieldMode()
for n in range(1, 6):
    row = []
    for rd in (sl(n), pgl(n), gl(n)):
        row.append(f"{rd.name}: pi1={pi1(rd).structure()} H1={h1_reductive(rd, whole(rd.group), qf, 0)}")
    print(" | ".join(row))

# %%
g = gl(3)
print(abelian_cohomology(g, whole(g.group), qf, 2, 0).result)

# %% [markdown]
# The quasi-split unitary form: Frobenius acts by -1 on pi1 = Z/3.

# %%
rd, J, frob = quasi_split_pu3()
print(pi1(rd).structure(), pi1(rd).action[frob].tolist(), h1_reductive(rd, J, qf, frob))
