"""Tate cohomology of finite groups acting on lattices.

Everything runs through one complex

    ... -> F_1⊗M -> F_0⊗M = M --N--> M = Hom(F_0, M) -> Hom(F_1, M) -> ...

built from a free ℤ[G]-resolution F of ℤ.  ``X_r`` is the term in degree r
(chains for r ≤ -1, cochains for r ≥ 0) and ``D_r : X_r -> X_{r+1}``.  Each
term is a direct sum of copies of M, so module maps act blockwise and the
connecting homomorphism is a plain lift / differentiate / solve.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .gmod import (FiniteMatrixGroup, GModule, ModuleMap, SubgroupHandle,
                   coinvariants_derived, dual_module, invariants_lattice,
                   norm_data, norm_matrix, restrict_action)
from .intlat import (AbHom, EchelonLattice, FgAbGroup, Solver, Subquotient,
                     block_diag, exact_at, hstack, identity, kernel_basis,
                     preimage, zeros)

DEFAULT_DEGREE_CAP = 3


class DegreeCapExceeded(ValueError):
    pass


class NotExactInput(ValueError):
    pass


class NotFreeModule(ValueError):
    pass


# ---------------------------------------------------------------------------
# resolutions
#
# d_k sends the i-th free generator of F_k to  Σ c · h·e_j  (e_j generators
# of F_{k-1}); stored as ``diffs[k][i] = {(j, h): c}``.


class Resolution:
    """A free ℤ[G]-resolution of ℤ, extended lazily."""

    kind = "abstract"

    def __init__(self, G: FiniteMatrixGroup):
        self.group = G
        self.ranks = [1]
        self.diffs: list[list[dict]] = [[]]

    def ensure(self, k: int):
        while len(self.ranks) <= k:
            self._extend()

    def rank(self, k: int) -> int:
        self.ensure(k)
        return self.ranks[k]

    def differential(self, k: int) -> list[dict]:
        self.ensure(k)
        return self.diffs[k]

    def z_matrix(self, k: int) -> np.ndarray:
        """d_k as a ℤ-matrix; coordinate ``j*|G| + h`` stands for ``h·e_j``."""
        G = self.group
        m = G.order
        self.ensure(k)
        Z = zeros(m * self.ranks[k - 1], m * self.ranks[k])
        for i, v in enumerate(self.diffs[k]):
            for g in range(m):
                row = G.mul[g]
                col = i * m + g
                for (j, h), c in v.items():
                    Z[j * m + row[h], col] += c
        return Z

    def _extend(self):
        raise NotImplementedError


class BarResolution(Resolution):
    """The (unnormalized) bar resolution: F_k has basis G^k."""

    kind = "bar"

    def _extend(self):
        G = self.group
        m = G.order
        k = len(self.ranks)
        self.ranks.append(m ** k)
        diff = []
        for idx in range(m ** k):
            gs = _digits(idx, m, k)
            v: dict = {}

            def add(tup, h, c):
                key = (_index(tup, m), h)
                v[key] = v.get(key, 0) + c

            add(gs[1:], gs[0], 1)
            for i in range(k - 1):
                merged = gs[:i] + (G.mul[gs[i]][gs[i + 1]],) + gs[i + 2:]
                add(merged, 0, (-1) ** (i + 1))
            add(gs[:-1], 0, (-1) ** k)
            diff.append({key: c for key, c in v.items() if c})
        self.diffs.append(diff)


def _digits(idx, m, k):
    out = []
    for _ in range(k):
        idx, r = divmod(idx, m)
        out.append(r)
    return tuple(reversed(out))


def _index(tup, m):
    idx = 0
    for t in tup:
        idx = idx * m + t
    return idx


class CompactResolution(Resolution):
    """A small resolution: F_1 has one generator per group generator, and
    each later term is chosen greedily to cover the kernel of the previous
    differential."""

    kind = "compact"

    def _extend(self):
        G = self.group
        k = len(self.ranks)
        if k == 1:
            gens = [s for s in G.generators if s != 0]
            diff = [{(0, s): 1, (0, 0): -1} for s in gens]
        else:
            diff = self._cover_kernel(k - 1)
        self.ranks.append(len(diff))
        self.diffs.append(diff)

    def _cover_kernel(self, k):
        G = self.group
        m = G.order
        if self.ranks[k] == 0:
            return []
        K = kernel_basis(self.z_matrix(k))
        lat = EchelonLattice(K.shape[0])
        diff = []
        cols = sorted(range(K.shape[1]), key=lambda c: sum(abs(int(x)) for x in K[:, c]))
        for c in cols:
            vec = [int(x) for x in K[:, c]]
            if vec in lat:
                continue
            diff.append({(pos // m, pos % m): x for pos, x in enumerate(vec) if x})
            for g in range(m):
                row = G.mul[g]
                w = [0] * len(vec)
                for pos, x in enumerate(vec):
                    if x:
                        j, h = divmod(pos, m)
                        w[j * m + row[h]] = x
                lat.add(w)
        return diff


def resolution(G: FiniteMatrixGroup, method: str = "compact") -> Resolution:
    if method not in G._resolutions:
        if method == "bar":
            G._resolutions[method] = BarResolution(G)
        elif method == "compact":
            G._resolutions[method] = CompactResolution(G)
        else:
            raise ValueError(f"unknown resolution {method!r}")
    return G._resolutions[method]


# ---------------------------------------------------------------------------
# the Tate complex


class TateComplex:
    """The complete complex of a module over the group it is defined on."""

    def __init__(self, M: GModule, method: str = "compact"):
        self.module = M
        self.res = resolution(M.group, method)
        self._maps = {}

    def copies(self, r: int) -> int:
        """Number of copies of M in X_r."""
        return self.res.rank(r if r >= 0 else -r - 1)

    def relations(self, r: int) -> np.ndarray:
        return block_diag([self.module.relations] * self.copies(r)) if self.copies(r) else \
            zeros(0, 0)

    def rank(self, r: int) -> int:
        return self.module.rank * self.copies(r)

    def D(self, r: int) -> np.ndarray:
        if r not in self._maps:
            self._maps[r] = self._build(r)
        return self._maps[r]

    def _build(self, r):
        M = self.module
        n = M.rank
        if r == -1:
            return norm_matrix(M)
        G = M.group
        if r >= 0:
            diff = self.res.differential(r + 1)
            out = zeros(n * len(diff), n * self.res.rank(r))
            for i, v in enumerate(diff):
                for (j, h), c in v.items():
                    out[i * n:(i + 1) * n, j * n:(j + 1) * n] += c * M.action[h]
            return out
        k = -r - 1
        diff = self.res.differential(k)
        out = zeros(n * self.res.rank(k - 1), n * len(diff))
        for i, v in enumerate(diff):
            for (j, h), c in v.items():
                out[j * n:(j + 1) * n, i * n:(i + 1) * n] += c * M.action[G.inv[h]]
        return out

    def cycles(self, r: int) -> np.ndarray:
        return preimage(self.D(r), self.relations(r + 1))

    def boundaries(self, r: int) -> np.ndarray:
        return hstack([self.D(r - 1), self.relations(r)], self.rank(r))

    def cohomology(self, r: int) -> Subquotient:
        return Subquotient(self.cycles(r), self.boundaries(r))


@dataclass
class CohomologyResult:
    """Ĥ^r(J, M) together with a presentation by cochains.

    ``generators`` are cocycles in X_r (ambient coordinates); every element
    has canonical coordinates via ``subquotient.coords``.
    """

    degree: int
    group: FgAbGroup
    subquotient: Subquotient
    complex: TateComplex

    @property
    def generators(self) -> np.ndarray:
        return self.subquotient.generators

    @property
    def relations(self) -> np.ndarray:
        return self.subquotient.boundaries

    @property
    def moduli(self) -> list[int]:
        return self.subquotient.moduli

    def check(self) -> bool:
        """Each generator is a cocycle."""
        r = self.degree
        img = self.complex.D(r) @ self.generators
        rel = self.complex.relations(r + 1)
        if not img.any():
            return True
        return Solver(rel).solve(img) is not None if rel.shape[1] else False

    def __str__(self):
        return str(self.group)


def _on_subgroup(M: GModule, subgroup: SubgroupHandle | None) -> GModule:
    if subgroup is None or subgroup.order == M.group.order:
        return M
    return restrict_action(M, subgroup)


def _check_degree(r: int, cap: int):
    if abs(r) > cap:
        raise DegreeCapExceeded(f"degree {r} outside the window |r| <= {cap}")


def tate(M: GModule, r: int, subgroup: SubgroupHandle | None = None,
         method: str = "compact", cap: int = DEFAULT_DEGREE_CAP) -> CohomologyResult:
    """Ĥ^r(J, M) where J is ``subgroup`` (default: the whole acting group)."""
    _check_degree(r, cap)
    Mj = _on_subgroup(M, subgroup)
    X = TateComplex(Mj, method)
    if r == 0:
        nd = norm_data(Mj)
        sq = Subquotient(invariants_lattice(Mj), nd.image)
    elif r == -1:
        nd = norm_data(Mj)
        sq = Subquotient(nd.kernel, nd.augmentation)
    else:
        sq = X.cohomology(r)
    return CohomologyResult(r, sq.group, sq, X)


def tate_via_complex(M: GModule, r: int, subgroup: SubgroupHandle | None = None,
                     method: str = "compact") -> CohomologyResult:
    """Same as ``tate`` but never using the closed formulas (a cross-check)."""
    X = TateComplex(_on_subgroup(M, subgroup), method)
    sq = X.cohomology(r)
    return CohomologyResult(r, sq.group, sq, X)


def induced_map(f: ModuleMap, r: int, subgroup: SubgroupHandle | None = None,
                method: str = "compact", cap: int = DEFAULT_DEGREE_CAP,
                source: CohomologyResult | None = None,
                target: CohomologyResult | None = None) -> AbHom:
    """Ĥ^r(J, M) -> Ĥ^r(J, M′) induced by an equivariant map."""
    f.check()
    src = source or tate(f.source, r, subgroup, method, cap)
    tgt = target or tate(f.target, r, subgroup, method, cap)
    blocks = block_diag([f.matrix] * src.complex.copies(r)) if src.complex.copies(r) else \
        zeros(0, 0)
    return AbHom.between(src.subquotient, tgt.subquotient, blocks)


class ShortExactSequence:
    """0 -> A -i-> B -p-> C -> 0, checked on the underlying abelian groups."""

    def __init__(self, i: ModuleMap, p: ModuleMap, check: bool = True):
        if i.target is not p.source:
            raise NotExactInput("maps do not compose")
        self.i, self.p = i, p
        self.A, self.B, self.C = i.source, i.target, p.target
        if check:
            self.check()

    def check(self):
        try:
            self.i.check()
            self.p.check()
        except ValueError as e:
            raise NotExactInput(str(e)) from e
        sa, sb, sc = (Subquotient(identity(X.rank), X.relations) for X in (self.A, self.B, self.C))
        fi = AbHom.between(sa, sb, self.i.matrix)
        fp = AbHom.between(sb, sc, self.p.matrix)
        if not fi.is_injective():
            raise NotExactInput("first map is not injective")
        if not fp.is_surjective():
            raise NotExactInput("second map is not surjective")
        if not exact_at(fi, fp):
            raise NotExactInput("image of the first map differs from the kernel of the second")
        return self


def connecting_map(ses: ShortExactSequence, r: int, subgroup: SubgroupHandle | None = None,
                   method: str = "compact", cap: int = DEFAULT_DEGREE_CAP) -> AbHom:
    """δ : Ĥ^r(J, C) -> Ĥ^{r+1}(J, A)."""
    _check_degree(r, cap)
    _check_degree(r + 1, cap)
    hc = tate(ses.C, r, subgroup, method, cap)
    ha = tate(ses.A, r + 1, subgroup, method, cap)
    XB = TateComplex(_on_subgroup(ses.B, subgroup), method)
    k = hc.complex.copies(r)
    k1 = ha.complex.copies(r + 1)
    if not hc.moduli:
        return AbHom([], ha.moduli, zeros(len(ha.moduli), 0))
    # lift through p
    P = block_diag([ses.p.matrix] * k)
    lift = Solver(hstack([P, hc.complex.relations(r)], P.shape[0])).solve_exact(hc.generators)
    b = lift[:P.shape[1]]
    db = XB.D(r) @ b
    I = block_diag([ses.i.matrix] * k1)
    a = Solver(hstack([I, XB.relations(r + 1)], I.shape[0])).solve_exact(db)[:I.shape[1]]
    return AbHom(hc.moduli, ha.moduli, ha.subquotient.coords(a))


def long_exact_checks(ses: ShortExactSequence, r: int, subgroup=None,
                      method: str = "compact") -> dict[str, bool]:
    """Exactness of the long sequence around Ĥ^r(C) and Ĥ^{r+1}(A)."""
    hB = tate(ses.B, r, subgroup, method)
    hC = tate(ses.C, r, subgroup, method)
    hA1 = tate(ses.A, r + 1, subgroup, method)
    hB1 = tate(ses.B, r + 1, subgroup, method)
    p_r = induced_map(ses.p, r, subgroup, method, source=hB, target=hC)
    i_r1 = induced_map(ses.i, r + 1, subgroup, method, source=hA1, target=hB1)
    d = connecting_map(ses, r, subgroup, method)
    return {"at_C": exact_at(p_r, d), "at_A": exact_at(d, i_r1)}


# ---------------------------------------------------------------------------


class Lemma21Result(NamedTuple):
    h1_dual: FgAbGroup
    coinv_dual: GModule
    inv_dual: FgAbGroup
    q: AbHom
    exact: bool


def lemma21_sequence(M: GModule, subgroup: SubgroupHandle | None = None,
                     method: str = "compact") -> Lemma21Result:
    """0 -> H¹(J,M)^D -> (M^∨)_J -q-> (M^J)^∨ -> 0 for a lattice M.

    ``q`` restricts a functional to the invariant sublattice.
    """
    if not M.is_free:
        raise NotFreeModule("the module must be a lattice")
    h1 = tate(M, 1, subgroup, method).group
    Mj = _on_subgroup(M, subgroup)
    D = dual_module(Mj)
    co = coinvariants_derived(D, None, residual=False)
    L = invariants_lattice(Mj)
    src = Subquotient(identity(D.rank), hstack([D.relations, _augmentation(D)], D.rank))
    tgt = Subquotient(identity(L.shape[1]), zeros(L.shape[1], 0))
    q = AbHom.between(src, tgt, L.T.copy())
    ker = q.kernel()
    exact = q.is_surjective() and ker.is_finite and ker.order == h1.order
    return Lemma21Result(h1, co.module, tgt.group, q, exact)


def _augmentation(D: GModule) -> np.ndarray:
    n = D.rank
    return hstack([D.action[g] - identity(n) for g in D.group.generators], n)
