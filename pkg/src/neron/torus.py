"""Tori over a local field, described by their character lattices.

A torus is a lattice X* with an action of a finite group Γ, a normal
inertia subgroup J and optionally a Frobenius element generating Γ/J.
Component groups are coinvariants of the cocharacter lattice under J.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .gcoh import (NotExactInput, NotFreeModule, ShortExactSequence, induced_map,
                   lemma21_sequence, tate)
from .gmod import (FiniteMatrixGroup, GModule, GroupError, ModuleMap,
                   NonNormalSubgroupForResidualAction, SubgroupHandle, close_group,
                   coinvariants_derived, coset_generated, dual_module, induced_module,
                   invariants_lattice, mat_key, norm_matrix, quotient_module, subgroup,
                   submodule, whole)
from .intlat import (AbHom, FgAbGroup, Solver, Subquotient, block_diag, exact_at,
                     hstack, identity, image_basis, intmat, kernel_basis, zeros)


class NonFreeCokernel(ArithmeticError):
    pass


class MismatchedGaloisData(ValueError):
    pass


class ReductionType(str, Enum):
    MULTIPLICATIVE = "Multiplicative"
    UNIPOTENT = "Unipotent"
    MIXED = "Mixed"


@dataclass
class TorusModel:
    """Character lattice with Galois action, inertia subgroup and Frobenius."""

    char_module: GModule
    inertia: SubgroupHandle
    frobenius: int | None = None
    name: str = ""

    def __post_init__(self):
        X = self.char_module
        if not X.is_free:
            raise NotFreeModule("character module must be a lattice")
        if self.inertia.group is not X.group:
            raise GroupError("inertia is a subgroup of a different group")
        if not self.inertia.is_normal:
            raise NonNormalSubgroupForResidualAction("inertia must be normal")
        if self.frobenius is not None and not coset_generated(X.group, self.inertia,
                                                             self.frobenius):
            raise GroupError("frobenius does not generate the quotient by inertia")

    @property
    def galois(self) -> FiniteMatrixGroup:
        return self.char_module.group

    @property
    def rank(self) -> int:
        return self.char_module.rank

    def with_module(self, X: GModule, name: str = "") -> "TorusModel":
        return TorusModel(X, self.inertia, self.frobenius, name)


def split_torus(n: int = 1, name: str = "") -> TorusModel:
    G = close_group([])
    return TorusModel(GModule.trivial(G, n), whole(G), 0,
                      name or ("G_m" if n == 1 else f"G_m^{n}"))


def torus_from_generators(matrices, perms=None, inertia=(), frobenius=None,
                          names=None, name: str = "") -> TorusModel:
    """Build a torus from generator matrices acting on X*.

    ``perms`` optionally attaches a permutation matrix to each generator; the
    Galois group is then generated by the pairs, so it may act non-faithfully
    on X* (as for a split torus over a ramified extension).  ``inertia`` and
    ``frobenius`` are words (strings) or element indices.
    """
    from .gmod import parse_word
    mats = [intmat(m) for m in matrices]
    if perms is not None and any(p is not None for p in perms):
        full = [block_diag([intmat(p), m]) if p is not None else
                block_diag([identity(_perm_size(perms)), m]) for p, m in zip(perms, mats)]
    else:
        full = mats
    G = close_group(full, names=names)
    n = mats[0].shape[0] if mats else 0
    action = [g[g.shape[0] - n:, g.shape[0] - n:].copy() for g in G.matrices]
    X = GModule(G, action, check=False)

    def elem(w):
        return parse_word(G, w) if isinstance(w, str) else int(w)

    J = subgroup(G, [elem(w) for w in inertia])
    frob = elem(frobenius) if frobenius is not None else None
    return TorusModel(X, J, frob, name)


def _perm_size(perms):
    return next(intmat(p).shape[0] for p in perms if p is not None)


def faithful_image(T: TorusModel) -> tuple[TorusModel, list[int]]:
    """Replace Γ by its image in Aut(X*); returns the new torus and the map on elements."""
    G = T.galois
    X = T.char_module
    gens = [X.action[s] for s in G.generators]
    H = close_group(gens or [identity(X.rank)]) if X.rank else close_group([])
    index = {mat_key(m): i for i, m in enumerate(H.matrices)}
    images = [index[mat_key(X.action[g])] for g in range(G.order)]
    Y = GModule(H, H.matrices, check=False)
    J = subgroup(H, [images[g] for g in T.inertia.elements])
    frob = images[T.frobenius] if T.frobenius is not None else None
    return TorusModel(Y, J, frob, T.name), images


def cocharacters(T: TorusModel) -> GModule:
    """X_* = Hom(X*, ℤ) with the contragredient action."""
    return dual_module(T.char_module)


def invariant_characters(T: TorusModel) -> np.ndarray:
    return invariants_lattice(T.char_module, T.inertia)


def reduction_type(T: TorusModel) -> ReductionType:
    X = T.char_module
    if X.acts_trivially(T.inertia):
        return ReductionType.MULTIPLICATIVE
    if invariant_characters(T).shape[1] == 0:
        return ReductionType.UNIPOTENT
    return ReductionType.MIXED


@dataclass
class ReductionPieces:
    """Character lattices of the four pieces, with the maps to and from X*.

    ``m_upper`` (X*^J) and ``u_upper`` (kernel of the norm) are sublattices;
    ``u_lower`` (X*/X*^J) and ``m_lower`` (norm image) are quotients.
    """

    m_upper: GModule
    u_lower: GModule
    m_lower: GModule
    u_upper: GModule
    inclusion_m: np.ndarray
    projection_u: np.ndarray
    inclusion_u: np.ndarray
    projection_m: np.ndarray
    checks: dict = field(default_factory=dict)

    def as_dict(self) -> dict[str, GModule]:
        return {"T_(m)": self.m_lower, "T^(m)": self.m_upper,
                "T_(u)": self.u_lower, "T^(u)": self.u_upper}


def reduction_pieces(T: TorusModel) -> ReductionPieces:
    X = T.char_module
    L = invariant_characters(T)
    mu = submodule(X, L)
    ul = quotient_module(X, L)
    N = norm_matrix(X, T.inertia)
    B = image_basis(N)
    ml = submodule(X, B)
    to_ml = Solver(B).solve_exact(N) if B.shape[1] else zeros(0, X.rank)
    K = kernel_basis(N)
    uu = submodule(X, K)
    pieces = ReductionPieces(mu.module, ul.module, ml.module, uu.module,
                             L, ul.forward, K, to_ml)
    free = all(m.is_free for m in (mu.module, ul.module, ml.module, uu.module))
    pieces.checks = {
        "free": free,
        "umr_exact": _ses_ok(ModuleMap(mu.module, X, L), ModuleMap(X, ul.module, ul.forward)),
        "tseq_exact": _ses_ok(ModuleMap(uu.module, X, K), ModuleMap(X, ml.module, to_ml)),
    }
    return pieces


def _ses_ok(i: ModuleMap, p: ModuleMap) -> bool:
    try:
        ShortExactSequence(i, p)
    except NotExactInput:
        return False
    return True


# ---------------------------------------------------------------------------
# component groups


def coinvariant_subquotient(M: GModule, J: SubgroupHandle) -> Subquotient:
    """M_J as a subquotient of the ambient lattice (for explicit maps)."""
    n = M.rank
    gens = [M.action[g] - identity(n) for g in J.generators]
    return Subquotient(identity(n), hstack([M.relations] + gens, n))


@dataclass
class ComponentGroup:
    module: GModule
    structure: FgAbGroup
    torsion_part: FgAbGroup
    free_rank: int
    checks: dict = field(default_factory=dict)

    def __str__(self):
        return str(self.structure)


def component_group(T: TorusModel) -> ComponentGroup:
    """φ(T) = X_*(T)_J with its residual action of Γ/J."""
    Y = cocharacters(T)
    phi = coinvariants_derived(Y, T.inertia, residual=True).module
    s = phi.structure()
    h1 = tate(T.char_module, 1, T.inertia).group
    checks = {
        "torsion_matches_h1": s.torsion() == h1,
        "free_rank_matches_invariants": s.rank == invariant_characters(T).shape[1],
    }
    return ComponentGroup(phi, s, s.torsion(), s.rank, checks)


@dataclass
class ComponentSequence:
    tors: FgAbGroup
    q: AbHom
    free_target: GModule
    exact: bool


def component_sequence(T: TorusModel) -> ComponentSequence:
    """0 -> H¹(J,X*)^D -> X_*(T)_J -q-> (X*^J)^∨ -> 0.

    ``q`` restricts a cocharacter (viewed as a functional on X*) to X*^J.
    """
    res = lemma21_sequence(T.char_module, T.inertia)
    inv = submodule(T.char_module, invariant_characters(T)).module
    return ComponentSequence(res.h1_dual, res.q, dual_module(inv), res.exact)


def phi_map(f: ModuleMap, J: SubgroupHandle) -> AbHom:
    """φ(T) -> φ(T′) for a morphism of tori, given by ``f: X*(T′) -> X*(T)``."""
    f.check()
    src = coinvariant_subquotient(dual_module(f.target), J)
    tgt = coinvariant_subquotient(dual_module(f.source), J)
    return AbHom.between(src, tgt, f.matrix.T.copy())


# ---------------------------------------------------------------------------
# Weil restriction and the canonical resolution


def weil_restriction(T: TorusModel) -> TorusModel:
    """Restriction of scalars of the split torus T_L: characters ℤⁿ[Γ]."""
    R = induced_module(T.rank, T.galois) if T.rank else GModule(T.galois, [zeros(0, 0)] * T.galois.order,
                                                                  check=False)
    return T.with_module(R, f"R({T.name})" if T.name else "")


def unit_map(T: TorusModel) -> ModuleMap:
    """u(χ) = Σ_γ γ ⊗ (γ⁻¹χ), an equivariant embedding X* -> ℤⁿ[Γ]."""
    G = T.galois
    X = T.char_module
    n = T.rank
    R = weil_restriction(T).char_module
    U = zeros(n * G.order, n)
    for c in range(G.order):
        U[c * n:(c + 1) * n, :] = X.action[G.inv[c]]
    return ModuleMap(X, R, U).check()


def norm_one(T: TorusModel) -> TorusModel:
    """The torus whose characters are the cokernel of the unit map."""
    return _norm_one_derived(T)[0]


def _norm_one_derived(T: TorusModel):
    u = unit_map(T)
    d = quotient_module(u.target, u.matrix)
    if not d.module.is_free:
        raise NonFreeCokernel("cokernel of the unit map has torsion")
    return T.with_module(d.module, f"R1({T.name})" if T.name else ""), u, d.forward


@dataclass
class CanonicalResolution:
    """0 -> P -> Q -> T -> 0 on tori; characters 0 -> X*(T) -> X*(Q) -> X*(P) -> 0."""

    T: TorusModel
    P: TorusModel
    Q: TorusModel
    t_to_q: ModuleMap
    q_to_p: ModuleMap
    phi_p_to_q: AbHom
    phi_q_to_t: AbHom
    report: dict

    @property
    def ok(self) -> bool:
        return all(self.report.values())


def canonical_resolution(T: TorusModel) -> CanonicalResolution:
    T0, _ = faithful_image(T)
    J = T0.inertia
    R = weil_restriction(T0).char_module
    T1, u, pi = _norm_one_derived(T0)
    R1 = T1.char_module
    L = invariants_lattice(R1, J)
    P = submodule(R1, L).module
    rest = quotient_module(R1, L)
    rho = rest.forward @ pi
    Kq = kernel_basis(rho)
    Q = submodule(R, Kq).module
    t_to_q = ModuleMap(T0.char_module, Q, Solver(Kq).solve_exact(u.matrix)).check()
    q_to_p = ModuleMap(Q, P, Solver(L).solve_exact(pi @ Kq) if L.shape[1] else
                       zeros(0, Q.rank)).check()
    TP = T0.with_module(P, "P")
    TQ = T0.with_module(Q, "Q")

    sq_p = coinvariant_subquotient(dual_module(P), J)
    sq_q = coinvariant_subquotient(dual_module(Q), J)
    sq_t = coinvariant_subquotient(dual_module(T0.char_module), J)
    f = AbHom.between(sq_p, sq_q, q_to_p.matrix.T.copy())
    g = AbHom.between(sq_q, sq_t, t_to_q.matrix.T.copy())
    xp = Subquotient(identity(P.rank), zeros(P.rank, 0))
    f_raw = AbHom.between(xp, sq_q, q_to_p.matrix.T.copy())
    phi_t = component_group(T0).structure
    report = {
        "characters_exact": _ses_ok(t_to_q, q_to_p),
        "P_multiplicative": reduction_type(TP) == ReductionType.MULTIPLICATIVE,
        "H1_Q_vanishes": tate(Q, 1, J).group.is_trivial,
        "phi_sequence_exact": f.is_injective() and exact_at(f, g) and g.is_surjective(),
        "coinvariant_sequence_exact": f_raw.is_injective() and exact_at(f_raw, g),
        "phi_T_is_cokernel": f_raw.cokernel() == phi_t and phi_t == component_group(T).structure,
    }
    return CanonicalResolution(T0, TP, TQ, t_to_q, q_to_p, f, g, report)


# ---------------------------------------------------------------------------
# six-term sequence


@dataclass
class SixTermReport:
    h2: list[FgAbGroup]          # H²(J, X*(T_i)), i = 1, 2, 3
    phi: list[FgAbGroup]         # φ(T_i)
    kernel_order: int | None     # |ker(φ(T1) -> φ(T2))|
    h2_kernel_order: int | None  # |ker(H²(X*(T3)) -> H²(X*(T2)))|
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def six_term(T1: TorusModel, T2: TorusModel, T3: TorusModel, a, b) -> SixTermReport:
    """Checks around 0 -> T1 -> T2 -> T3 -> 0, given on characters as
    0 -> X*(T3) -a-> X*(T2) -b-> X*(T1) -> 0."""
    G = T2.galois
    if T1.galois is not G or T3.galois is not G:
        raise MismatchedGaloisData("tori are defined over different groups")
    if T1.inertia.elements != T2.inertia.elements or T3.inertia.elements != T2.inertia.elements:
        raise MismatchedGaloisData("tori have different inertia subgroups")
    J = T2.inertia
    X1, X2, X3 = T1.char_module, T2.char_module, T3.char_module
    fa = ModuleMap(X3, X2, a)
    fb = ModuleMap(X2, X1, b)
    ShortExactSequence(fa, fb)

    phi12 = phi_map(fb, J)
    phi23 = phi_map(fa, J)
    h = [tate(X, 2, J) for X in (X1, X2, X3)]
    h2a = induced_map(fa, 2, J, source=h[2], target=h[1])
    h2b = induced_map(fb, 2, J, source=h[1], target=h[0])
    ker = phi12.kernel()
    h2ker = h2a.kernel()
    phis = [component_group(T).structure for T in (T1, T2, T3)]
    checks = {
        "phi_right_exact": exact_at(phi12, phi23) and phi23.is_surjective(),
        "kernel_order_matches_h2": ker.is_finite and h2ker.is_finite and ker.order == h2ker.order,
        "h2_exact": exact_at(h2a, h2b),
    }
    if not phis[0].invariant_factors:
        checks["torsion_free_injective"] = ker.is_trivial
    return SixTermReport([x.group for x in h], phis, ker.order, h2ker.order, checks)
