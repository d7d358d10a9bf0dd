"""Galois cohomology of tori over a henselian discretely valued field K.

For a residue field k of cohomological dimension ≤ 1, H^r(K, T) is
H^r(k, X_*(T)_J); over a quasi-finite k these are evaluated in closed form
(Frobenius coinvariants).  Other modes return the module the cohomology is
taken of.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gcoh import tate
from .gmod import (GModule, GroupError, coinvariants_derived, dual_module,
                   parse_word, quotient_group, submodule)
from .intlat import FgAbGroup, Subquotient, hstack, identity, intmat, matrix_rank, zeros
from .torus import (ReductionType, TorusModel, cocharacters, invariant_characters,
                    reduction_type)


class NonCyclicAction(GroupError):
    pass


class InvalidDegree(ValueError):
    pass


class MissingFrobenius(ValueError):
    pass


class NotUnipotent(ValueError):
    pass


QUASI_FINITE = "quasi_finite"
GENERIC = "generic"
CD_N = "cd_n"


@dataclass(frozen=True)
class ResidueFieldMode:
    kind: str = QUASI_FINITE
    frobenius: int | str | None = None   # overrides the torus' Frobenius
    n: int = 1                           # cohomological dimension for CD_N

    def __post_init__(self):
        if self.kind not in (QUASI_FINITE, GENERIC, CD_N):
            raise ValueError(f"unknown residue field mode {self.kind!r}")
        if self.kind == CD_N and self.n < 0:
            raise ValueError("cohomological dimension must be non-negative")

    @classmethod
    def parse(cls, text: str, frobenius=None) -> "ResidueFieldMode":
        """``quasi-finite``, ``generic`` or ``cd<n>`` / ``cd-<n>``."""
        t = text.strip().lower().replace("_", "-")
        if t in ("quasi-finite", "quasifinite", "finite"):
            return cls(QUASI_FINITE, frobenius)
        if t in ("generic", "cd1", "cd<=1", "generic-cd1"):
            return cls(GENERIC, frobenius)
        if t.startswith("cd"):
            try:
                return cls(CD_N, frobenius, int(t[2:].lstrip("-")))
            except ValueError:
                pass
        raise ValueError(f"unknown residue field mode {text!r}")

    @property
    def cd_le_1(self) -> bool:
        return self.kind != CD_N or self.n <= 1

    def __str__(self):
        return f"cd{self.n}" if self.kind == CD_N else self.kind.replace("_", "-")


@dataclass(frozen=True)
class DivisibleGroup:
    """(ℚ/ℤ)^rank."""

    rank: int

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0

    def __str__(self):
        if self.rank == 0:
            return "0"
        return "Q/Z" if self.rank == 1 else f"(Q/Z)^{self.rank}"


@dataclass
class SymbolicModule:
    """The module whose cohomology H^degree(k, ·) the answer is."""

    module: GModule
    degree: int
    label: str

    @property
    def is_trivial(self) -> bool:
        return self.module.structure().is_trivial

    def __str__(self):
        return f"H^{self.degree}(k, {self.label}) with {self.label} = {self.module.structure()}"


@dataclass
class LocalCohomologyReport:
    degree: int
    result: FgAbGroup | DivisibleGroup | SymbolicModule
    mode: ResidueFieldMode

    def __str__(self):
        return str(self.result)


# ---------------------------------------------------------------------------


def procyclic_coinvariants(action: np.ndarray, relations: np.ndarray) -> Subquotient:
    """M/(σ−1)M for M = ℤⁿ/relations with σ acting by ``action``."""
    n = action.shape[0]
    return Subquotient(identity(n), hstack([relations, action - identity(n)], n))


def h1_procyclic_matrix(action, relations=None) -> FgAbGroup:
    a = intmat(action)
    rel = intmat(relations, rows=a.shape[0]) if relations is not None else zeros(a.shape[0], 0)
    return procyclic_coinvariants(a, rel).group.torsion()


def h1_procyclic(M: GModule, sigma: int) -> FgAbGroup:
    """Torsion of M/(σ−1)M, where σ generates the acting group."""
    G = M.group
    if G.element_order(sigma) != G.order:
        raise NonCyclicAction("the acting group is not generated by the given element")
    return h1_procyclic_matrix(M.action[sigma], M.relations)


def _frobenius(T: TorusModel, mode: ResidueFieldMode) -> int:
    f = mode.frobenius if mode.frobenius is not None else T.frobenius
    if f is None:
        raise MissingFrobenius("quasi-finite mode needs a Frobenius element")
    if isinstance(f, str):
        f = parse_word(T.galois, f)
    T_check = TorusModel(T.char_module, T.inertia, f)  # validates generation
    return T_check.frobenius


def component_module_with_frobenius(T: TorusModel, frob: int):
    """φ(T) as a module over Γ/J and the coset of Frobenius in it."""
    d = coinvariants_derived(cocharacters(T), T.inertia, residual=True)
    if T.inertia.order == 1:
        return d.module, frob
    _, coset_of = quotient_group(T.galois, T.inertia)
    return d.module, coset_of[frob]


def divisible_rank(T: TorusModel, frob: int) -> int:
    """Rank of the Frobenius coinvariants of (X*^J)^∨."""
    L = invariant_characters(T)
    k = L.shape[1]
    if k == 0:
        return 0
    inv = dual_module(submodule(T.char_module, L).module)
    return k - matrix_rank(inv.action[frob] - identity(k))


def local_cohomology(T: TorusModel, mode: ResidueFieldMode, r: int) -> LocalCohomologyReport:
    """H^r(K, T) for r ≥ 1."""
    if r < 1:
        raise InvalidDegree("degree must be at least 1")
    zero = FgAbGroup(0, ())
    if mode.kind == CD_N and mode.n >= 2:
        if r == mode.n + 1:
            L = invariant_characters(T)
            inv = dual_module(submodule(T.char_module, L).module)
            return LocalCohomologyReport(r, SymbolicModule(inv, r, "(X*(T)^I)^v"), mode)
        if r >= mode.n + 2:
            return LocalCohomologyReport(r, zero, mode)
        raise InvalidDegree(f"degree {r} is not determined for cohomological dimension {mode.n}")
    if r >= 3 or (mode.kind == CD_N and mode.n == 0 and r >= 2):
        return LocalCohomologyReport(r, zero, mode)
    if mode.kind != QUASI_FINITE:
        phi = coinvariants_derived(cocharacters(T), T.inertia, residual=True).module
        return LocalCohomologyReport(r, SymbolicModule(phi, r, "X_*(T)_I"), mode)
    frob = _frobenius(T, mode)
    if r == 1:
        phi, s = component_module_with_frobenius(T, frob)
        return LocalCohomologyReport(1, h1_procyclic_matrix(phi.action[s], phi.relations), mode)
    return LocalCohomologyReport(2, DivisibleGroup(divisible_rank(T, frob)), mode)


# ---------------------------------------------------------------------------
# second route for unipotent tori


def h1_inertia_with_frobenius(T: TorusModel, frob: int):
    """H¹(J, X*) in canonical coordinates with the matrix of Frobenius on it.

    Frobenius acts on crossed homomorphisms by (σf)(h) = σ f(σ⁻¹ h σ).
    """
    G = T.galois
    X = T.char_module
    h = tate(X, 1, T.inertia)
    Jg = h.complex.module.group
    parent = list(range(G.order)) if Jg is G else Jg.parent_indices
    pos = {g: i for i, g in enumerate(parent)}
    gens = [s for s in Jg.generators if s != 0]
    n = X.rank
    inv_f = G.inv[frob]
    cols = []
    for c in range(h.generators.shape[1]):
        vals = {gens[i]: h.generators[i * n:(i + 1) * n, c] for i in range(len(gens))}
        f = _crossed_hom(Jg, X, parent, vals)
        out = []
        for s in gens:
            t = pos[G.mul[G.mul[inv_f][parent[s]]][frob]]
            out.append(X.action[frob] @ f[t])
        cols.append(np.concatenate(out) if out else zeros(0, 1)[:, 0])
    if not cols:
        return h, zeros(0, 0)
    img = np.stack(cols, axis=1)
    return h, h.subquotient.coords(img)


def _crossed_hom(Jg, X, parent, vals):
    # f(g s) = f(g) + g f(s), expanded along the BFS words
    n = X.rank
    f = {0: zeros(n, 1)[:, 0]}
    order = sorted(range(Jg.order), key=lambda g: len(Jg.words[g]))
    for g in order:
        if g == 0:
            continue
        w = Jg.words[g]
        prev = Jg.element(w[:-1])
        s = Jg.generators[w[-1]]
        f[g] = f[prev] + X.action[parent[prev]] @ vals[s]
    return f


def finite_dual_action(action: np.ndarray, moduli) -> np.ndarray:
    """Matrix of the contragredient action on Hom(⊕ℤ/dᵢ, ℚ/ℤ) ≅ ⊕ℤ/dᵢ.

    ``action`` is the matrix of σ⁻¹ in canonical coordinates.
    """
    k = len(moduli)
    C = zeros(k, k)
    for i in range(k):
        for j in range(k):
            C[j, i] = (action[i, j] * moduli[j] // moduli[i]) % moduli[j]
    return C


def unipotent_cross_check(T: TorusModel, mode: ResidueFieldMode) -> bool:
    """Compare H¹(K,T) with H¹(k, H¹(J,X*)^D) for a unipotent torus."""
    if reduction_type(T) != ReductionType.UNIPOTENT:
        raise NotUnipotent("torus does not have unipotent reduction")
    if mode.kind != QUASI_FINITE:
        phi = coinvariants_derived(cocharacters(T), T.inertia).module.structure()
        return phi == tate(T.char_module, 1, T.inertia).group
    frob = _frobenius(T, mode)
    route1 = local_cohomology(T, mode, 1).result
    h, F = h1_inertia_with_frobenius(T, frob)
    moduli = h.moduli
    if not moduli:
        route2 = FgAbGroup(0, ())
    else:
        if any(d == 0 for d in moduli):
            return False
        Finv = _inverse_mod(F, moduli, T.galois.element_order(frob))
        D = finite_dual_action(Finv, moduli)
        rel = zeros(len(moduli), len(moduli))
        for i, d in enumerate(moduli):
            rel[i, i] = d
        route2 = h1_procyclic_matrix(D, rel)
    h2_zero = local_cohomology(T, mode, 2).result.is_trivial
    return route1 == route2 and h2_zero


def _inverse_mod(F, moduli, order):
    # σ has finite order m, so σ⁻¹ = σ^(m-1)
    k = len(moduli)
    out = identity(k)
    for _ in range(order - 1):
        out = out @ F
        for i, d in enumerate(moduli):
            out[i] = [x % d for x in out[i]]
    return out
