"""Algebraic fundamental groups of reductive groups and their abelian cohomology.

π₁(G) is computed as the cocharacter lattice of a maximal torus modulo the
coroot lattice.  Root data are not checked against the reflection axioms;
only the Galois stability needed here is verified.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gcoh import tate
from .gmod import (FiniteMatrixGroup, GModule, GroupError, SubgroupHandle, close_group,
                   coinvariants_derived, coset_generated, parse_word, quotient_group,
                   quotient_module, subgroups, trivial_subgroup, whole)
from .intlat import FgAbGroup, intmat, zeros
from .localfield import (CD_N, QUASI_FINITE, DivisibleGroup, InvalidDegree,
                         MissingFrobenius, ResidueFieldMode,
                         SymbolicModule, h1_procyclic_matrix)


class CorootsNotStable(GroupError):
    pass


@dataclass
class RootDatumModel:
    """Cocharacter lattice of a maximal torus with its coroots (columns).

    ``pi1`` may be given directly, bypassing the coroot presentation.
    """

    cochar_lattice: GModule
    coroots: list
    pi1: GModule | None = None
    name: str = ""

    def __post_init__(self):
        X = self.cochar_lattice
        if not X.is_free:
            raise ValueError("cocharacter lattice must be free")
        self.coroots = [tuple(int(x) for x in c) for c in self.coroots]
        if any(len(c) != X.rank for c in self.coroots):
            raise ValueError("coroot has the wrong length")
        roots = set(self.coroots)
        for g in X.group.generators:
            for c in self.coroots:
                image = tuple(int(x) for x in X.action[g].dot(np.array(c, dtype=object)))
                if image not in roots:
                    raise CorootsNotStable(f"generator {g} does not permute the coroots")

    @property
    def group(self) -> FiniteMatrixGroup:
        return self.cochar_lattice.group

    def coroot_matrix(self):
        n = self.cochar_lattice.rank
        return intmat([list(c) for c in self.coroots], cols=n).T.copy() if self.coroots else \
            zeros(n, 0)


def pi1(rd: RootDatumModel) -> GModule:
    """X_*(T) / ⟨coroots⟩."""
    if rd.pi1 is not None:
        return rd.pi1
    return quotient_module(rd.cochar_lattice, rd.coroot_matrix()).module


# ---------------------------------------------------------------------------
# type A data


def _trivial_group():
    return close_group([])


def sl(n: int, G: FiniteMatrixGroup | None = None) -> RootDatumModel:
    """Split SL_n: X_* is the coroot lattice, basis the simple coroots."""
    G = G or _trivial_group()
    r = n - 1
    cor = _type_a_positive(r)
    return RootDatumModel(GModule.trivial(G, r), cor, name=f"SL{n}")


def pgl(n: int, G: FiniteMatrixGroup | None = None) -> RootDatumModel:
    """Split PGL_n: X_* is the coweight lattice; simple coroots are the
    rows of the Cartan matrix in the fundamental coweight basis."""
    G = G or _trivial_group()
    r = n - 1
    cartan = [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(r)]
              for i in range(r)]
    cor = _close_type_a([tuple(row) for row in cartan])
    return RootDatumModel(GModule.trivial(G, r), cor, name=f"PGL{n}")


def gl(n: int, G: FiniteMatrixGroup | None = None) -> RootDatumModel:
    """Split GL_n: X_* = ℤⁿ, coroots e_i − e_j."""
    G = G or _trivial_group()
    cor = []
    for i in range(n):
        for j in range(n):
            if i != j:
                v = [0] * n
                v[i], v[j] = 1, -1
                cor.append(tuple(v))
    return RootDatumModel(GModule.trivial(G, n), cor, name=f"GL{n}")


def _type_a_positive(r):
    # positive coroots of A_r in the simple coroot basis: consecutive sums
    out = []
    for i in range(r):
        for j in range(i, r):
            v = [0] * r
            for t in range(i, j + 1):
                v[t] = 1
            out.append(tuple(v))
    return out + [tuple(-x for x in v) for v in out]


def _close_type_a(simple):
    r = len(simple)
    out = []
    for i in range(r):
        for j in range(i, r):
            v = [sum(simple[t][c] for t in range(i, j + 1)) for c in range(r)]
            out.append(tuple(v))
    return out + [tuple(-x for x in v) for v in out]


def quasi_split_pu3() -> tuple[RootDatumModel, SubgroupHandle, int]:
    """PU_3 split by an unramified quadratic extension: the outer
    automorphism swaps the two fundamental coweights."""
    G = close_group([[[0, 1], [1, 0]]], names=["f"])
    base = pgl(3)
    X = GModule(G, G.matrices, check=False)
    rd = RootDatumModel(X, base.coroots, name="PU3")
    return rd, trivial_subgroup(G), parse_word(G, "f")


# ---------------------------------------------------------------------------


def is_flasque(M: GModule) -> bool:
    """Whether H¹(Γ′, M) = 0 for every subgroup Γ′."""
    if not M.is_free:
        raise ValueError("flasque is defined for lattices")
    return all(tate(M, 1, H).group.is_trivial for H in subgroups(M.group))


@dataclass
class ReductiveReport:
    pi1: GModule
    pi1_coinv: GModule
    degree: int
    result: object
    h1: FgAbGroup | None = None

    def __str__(self):
        return str(self.result)


def _pi1_coinvariants(rd: RootDatumModel, J: SubgroupHandle):
    p = pi1(rd)
    return p, coinvariants_derived(p, J, residual=True).module


def _resolve_frobenius(rd: RootDatumModel, J: SubgroupHandle, frob):
    G = rd.group
    if frob is None:
        raise MissingFrobenius("quasi-finite mode needs a Frobenius element")
    if isinstance(frob, str):
        frob = parse_word(G, frob)
    if not coset_generated(G, J, frob):
        raise GroupError("frobenius does not generate the quotient by inertia")
    return frob


def abelian_cohomology(rd: RootDatumModel, J: SubgroupHandle, mode: ResidueFieldMode,
                       r: int, frobenius=None) -> ReductiveReport:
    """H^r_ab(K, G) = H^r(k, π₁(G)_J) for r ≥ 1."""
    if r < 1:
        raise InvalidDegree("degree must be at least 1")
    p, pj = _pi1_coinvariants(rd, J)
    zero = FgAbGroup(0, ())
    if mode.kind == CD_N and mode.n >= 2:
        if r >= mode.n + 2:
            return ReductiveReport(p, pj, r, zero)
        if r == mode.n + 1:
            return ReductiveReport(p, pj, r, SymbolicModule(pj, r, "pi1(G)_I"))
        raise InvalidDegree(f"degree {r} is not determined for cohomological dimension {mode.n}")
    if r >= 3 or (mode.kind == CD_N and mode.n == 0 and r >= 2):
        return ReductiveReport(p, pj, r, zero)
    if mode.kind != QUASI_FINITE:
        return ReductiveReport(p, pj, r, SymbolicModule(pj, r, "pi1(G)_I"))
    frob = mode.frobenius if mode.frobenius is not None else frobenius
    frob = _resolve_frobenius(rd, J, frob)
    if r == 1:
        h1 = h1_reductive(rd, J, mode, frob)
        return ReductiveReport(p, pj, 1, h1, h1)
    # H² of the finite part vanishes; the free part contributes (ℚ/ℤ)^ρ
    full = coinvariants_derived(p, whole(rd.group), residual=False).module.structure()
    return ReductiveReport(p, pj, 2, DivisibleGroup(full.rank))


def h1_reductive(rd: RootDatumModel, J: SubgroupHandle, mode: ResidueFieldMode,
                 frobenius=None) -> FgAbGroup:
    """H¹(K, G) = torsion of the full Galois coinvariants of π₁(G).

    Cross-checked against the two-step route (inertia, then Frobenius).
    """
    if mode.kind != QUASI_FINITE:
        raise InvalidDegree("closed form needs a quasi-finite residue field")
    frob = mode.frobenius if mode.frobenius is not None else frobenius
    p, pj = _pi1_coinvariants(rd, J)
    frob = _resolve_frobenius(rd, J, frob)
    one_step = coinvariants_derived(p, whole(rd.group), residual=False).module.structure().torsion()
    two_step = h1_two_step(p, pj, J, frob)
    if one_step != two_step:
        raise ArithmeticError(f"coinvariant routes disagree: {one_step} vs {two_step}")
    return one_step


def h1_two_step(p: GModule, pj: GModule, J: SubgroupHandle, frob: int) -> FgAbGroup:
    if J.order == 1:
        s = frob
    else:
        _, coset_of = quotient_group(p.group, J)
        s = coset_of[frob]
    return h1_procyclic_matrix(pj.action[s], pj.relations)
