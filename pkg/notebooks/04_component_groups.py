# %% [markdown]
# # Component groups of tori
# A torus is its character lattice, a Galois group acting on it, an inertia subgroup
# and optionally a Frobenius word.

# %%
from neron.torus import (canonical_resolution, component_group, reduction_type, six_term,
                         split_torus, torus_from_generators)

norm_one = torus_from_generators([[[-1]]], inertia=["g0"], frobenius="1")
for T in (split_torus(), norm_one):
    cg = component_group(T)
    print(cg.structure, reduction_type(T).value, cg.checks)

# %% [markdown]
# The resolution by induced tori gives the same group as a cokernel.

# %%
res = canonical_resolution(norm_one)
print(res.P.rank, res.Q.rank, res.phi_p_to_q.matrix.tolist(), res.phi_q_to_t.target)
print(res.ok)

# %% [markdown]
# Six-term sequence for the norm-one torus sitting between G_m and its Weil restriction.

# %%
from neron.corpus import builtin_corpus

doc = next(d for d in builtin_corpus() if d.name == "norm-one SES over ramified quadratic")
rep = six_term(*doc.ses())
print([str(g) for g in rep.h2], [str(g) for g in rep.phi], rep.checks)
