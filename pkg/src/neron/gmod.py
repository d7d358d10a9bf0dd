"""Finite groups of integer matrices and the lattices they act on."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .intlat import (FgAbGroup, Solver, block_diag, cokernel_group, determinant,
                     hstack, identity, image_basis, intmat, inverse, is_zero,
                     kernel_basis, mat_key, preimage, smith_normal_form, diagonal,
                     zeros)

DEFAULT_MAX_ORDER = 512


class GroupError(ValueError):
    pass


class NonUnimodularGenerator(GroupError):
    pass


class OrderBoundExceeded(GroupError):
    pass


class NonNormalSubgroupForResidualAction(GroupError):
    pass


class NonEquivariantMap(ValueError):
    pass


class FiniteMatrixGroup:
    """A finite group of unimodular matrices with its multiplication table.

    Element 0 is the identity.  ``words[i]`` writes element ``i`` as a product
    of generators (indices into ``generators``), read left to right.
    """

    def __init__(self, matrices, mul, generators, names=None):
        self.matrices = list(matrices)
        self.mul = mul
        self.generators = tuple(generators)
        self.names = tuple(names) if names is not None else tuple(
            f"g{i}" for i in range(len(self.generators)))
        n = len(self.matrices)
        self.inv = [0] * n
        for i in range(n):
            row = mul[i]
            for j in range(n):
                if row[j] == 0:
                    self.inv[i] = j
                    break
        self.words = _bfs_words(mul, self.generators)
        self._subgroups = None
        self._subgroup_groups = {}
        self._resolutions = {}

    @property
    def order(self) -> int:
        return len(self.matrices)

    @property
    def degree(self) -> int:
        return self.matrices[0].shape[0]

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"<FiniteMatrixGroup order={self.order} degree={self.degree}>"

    def element(self, word) -> int:
        """Element index of a word given as generator indices (negative = inverse)."""
        g = 0
        for w in word:
            s = self.generators[w] if w >= 0 else self.inv[self.generators[~w]]
            g = self.mul[g][s]
        return g

    def power(self, g: int, k: int) -> int:
        if k < 0:
            g, k = self.inv[g], -k
        out = 0
        for _ in range(k):
            out = self.mul[out][g]
        return out

    def element_order(self, g: int) -> int:
        k, h = 1, g
        while h != 0:
            h = self.mul[h][g]
            k += 1
        return k

    def conj(self, g: int, h: int) -> int:
        """g h g⁻¹."""
        return self.mul[self.mul[g][h]][self.inv[g]]

    def subgroup_group(self, elements) -> "FiniteMatrixGroup":
        """The subgroup on ``elements`` as a group in its own right (memoized)."""
        key = tuple(sorted(elements))
        if key not in self._subgroup_groups:
            pos = {e: i for i, e in enumerate(key)}
            mul = [[pos[self.mul[a][b]] for b in key] for a in key]
            gens = _greedy_generators(mul, range(len(key)))
            sub = FiniteMatrixGroup([self.matrices[e] for e in key], mul, gens)
            sub.parent_indices = key
            self._subgroup_groups[key] = sub
        return self._subgroup_groups[key]


def _bfs_words(mul, gens):
    words = {0: ()}
    queue = deque([0])
    while queue:
        g = queue.popleft()
        for k, s in enumerate(gens):
            h = mul[g][s]
            if h not in words:
                words[h] = words[g] + (k,)
                queue.append(h)
    return [words.get(i) for i in range(len(mul))]


def _closure(mul, elements) -> frozenset:
    # a finite monoid generated by group elements is the generated subgroup
    gens = [e for e in set(elements) if e]
    out = {0}
    queue = deque([0])
    while queue:
        a = queue.popleft()
        row = mul[a]
        for s in gens:
            c = row[s]
            if c not in out:
                out.add(c)
                queue.append(c)
    return frozenset(out)


def _greedy_generators(mul, elements) -> tuple[int, ...]:
    gens, span = [], frozenset([0])
    for e in elements:
        if e not in span:
            gens.append(e)
            span = _closure(mul, gens)
    return tuple(gens)


def close_group(generators, max_order: int = DEFAULT_MAX_ORDER, names=None) -> FiniteMatrixGroup:
    """Close a list of unimodular matrices under multiplication."""
    gens = [intmat(g) for g in generators]
    if names is not None and len(names) != len(gens):
        raise ValueError("one name per generator required")
    degree = gens[0].shape[0] if gens else 0
    for k, g in enumerate(gens):
        if g.shape != (degree, degree):
            raise GroupError(f"generator {k} is not {degree}x{degree}")
        if abs(determinant(g)) != 1:
            raise NonUnimodularGenerator(f"generator {k} has determinant {determinant(g)}")
    if not gens:
        return FiniteMatrixGroup([identity(0)], [[0]], (), names or ())
    elements = [identity(degree)]
    index = {mat_key(elements[0]): 0}
    right = []  # right[i][k] = index of elements[i] @ gens[k]
    i = 0
    while i < len(elements):
        row = []
        for g in gens:
            p = elements[i] @ g
            key = mat_key(p)
            if key not in index:
                if len(elements) >= max_order:
                    raise OrderBoundExceeded(
                        f"group order exceeds {max_order}; the generators may have infinite order")
                index[key] = len(elements)
                elements.append(p)
            row.append(index[key])
        right.append(row)
        i += 1
    n = len(elements)
    words = _bfs_words(right, range(len(gens)))
    mul = []
    for a in range(n):
        row = []
        for b in range(n):
            c = a
            for k in words[b]:
                c = right[c][k]
            row.append(c)
        mul.append(row)
    gen_idx = [index[mat_key(g)] for g in gens]
    return FiniteMatrixGroup(elements, mul, gen_idx, names)


@dataclass(frozen=True)
class SubgroupHandle:
    group: FiniteMatrixGroup = field(repr=False, compare=False)
    elements: tuple[int, ...]
    is_normal: bool

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def generators(self) -> tuple[int, ...]:
        return _greedy_generators(self.group.mul, self.elements)

    def as_group(self) -> FiniteMatrixGroup:
        return self.group.subgroup_group(self.elements)

    def __contains__(self, g: int) -> bool:
        return g in set(self.elements)


def _is_normal(G: FiniteMatrixGroup, elements) -> bool:
    es = set(elements)
    return all(G.conj(g, h) in es for g in G.generators for h in elements)


def subgroup(G: FiniteMatrixGroup, elements) -> SubgroupHandle:
    """The subgroup generated by the given element indices."""
    closed = tuple(sorted(_closure(G.mul, elements)))
    return SubgroupHandle(G, closed, _is_normal(G, closed))


def whole(G: FiniteMatrixGroup) -> SubgroupHandle:
    return SubgroupHandle(G, tuple(range(G.order)), True)


def trivial_subgroup(G: FiniteMatrixGroup) -> SubgroupHandle:
    return SubgroupHandle(G, (0,), True)


def subgroups(G: FiniteMatrixGroup) -> list[SubgroupHandle]:
    """All subgroups, ordered by size then by sorted element list."""
    if G._subgroups is None:
        found = {frozenset([0])}
        frontier = [frozenset([0])]
        while frontier:
            new = []
            for H in frontier:
                for g in range(G.order):
                    if g not in H:
                        K = _closure(G.mul, H | {g})
                        if K not in found:
                            found.add(K)
                            new.append(K)
            frontier = new
        ordered = sorted((tuple(sorted(H)) for H in found), key=lambda t: (len(t), t))
        G._subgroups = [SubgroupHandle(G, H, _is_normal(G, H)) for H in ordered]
    return list(G._subgroups)


def normal_subgroups(G: FiniteMatrixGroup) -> list[SubgroupHandle]:
    return [H for H in subgroups(G) if H.is_normal]


def normalizer(G: FiniteMatrixGroup, H: SubgroupHandle) -> SubgroupHandle:
    hs = set(H.elements)
    els = [g for g in range(G.order) if all(G.conj(g, h) in hs for h in H.elements)]
    return SubgroupHandle(G, tuple(els), _is_normal(G, els))


def quotient_group(G: FiniteMatrixGroup, H: SubgroupHandle) -> tuple[FiniteMatrixGroup, list[int]]:
    """``G/H`` realized by its regular permutation representation.

    Returns the quotient and the projection ``element index -> coset index``;
    cosets are ordered by their minimal element.
    """
    if not H.is_normal:
        raise NonNormalSubgroupForResidualAction("quotient by a non-normal subgroup")
    coset_of = [-1] * G.order
    reps = []
    for g in range(G.order):
        if coset_of[g] < 0:
            c = len(reps)
            reps.append(g)
            for h in H.elements:
                coset_of[G.mul[g][h]] = c
    m = len(reps)
    mul = [[coset_of[G.mul[a][b]] for b in reps] for a in reps]
    mats = []
    for a in range(m):
        P = zeros(m, m)
        for b in range(m):
            P[mul[a][b], b] = 1
        mats.append(P)
    gens = []
    for s in G.generators:
        c = coset_of[s]
        if c and c not in gens:
            gens.append(c)
    Q = FiniteMatrixGroup(mats, mul, gens)
    Q.representatives = reps
    return Q, coset_of


def coset_generated(G: FiniteMatrixGroup, H: SubgroupHandle, g: int) -> bool:
    """Whether the coset of ``g`` generates ``G/H``."""
    hs = set(H.elements)
    covered = set(hs)
    x = 0
    for _ in range(G.order // max(1, H.order)):
        x = G.mul[x][g]
        covered.update(G.mul[x][h] for h in hs)
    return len(covered) == G.order


# ---------------------------------------------------------------------------
# modules


class GModule:
    """ℤⁿ / colspan(relations) with a linear action of a finite group.

    ``action[g]`` is the n×n matrix of element ``g``.  With no relations the
    module is the lattice ℤⁿ.
    """

    def __init__(self, group: FiniteMatrixGroup, action, relations=None, check: bool = True):
        self.group = group
        self.action = [intmat(a) for a in action]
        n = self.action[0].shape[0] if self.action else 0
        self.relations = intmat(relations if relations is not None else zeros(n, 0), rows=n)
        if check:
            self.check()

    @classmethod
    def from_generator_images(cls, group: FiniteMatrixGroup, images, relations=None, check=True):
        images = [intmat(x) for x in images]
        if len(images) != len(group.generators):
            raise ValueError("one image per group generator required")
        n = images[0].shape[0] if images else (intmat(relations).shape[0] if relations is not None else 0)
        action = []
        for w in group.words:
            a = identity(n)
            for k in w:
                a = a @ images[k]
            action.append(a)
        return cls(group, action, relations, check)

    @classmethod
    def trivial(cls, group: FiniteMatrixGroup, n: int = 1) -> "GModule":
        return cls(group, [identity(n)] * group.order, check=False)

    @property
    def rank(self) -> int:
        """Ambient rank (number of generators of the presentation)."""
        return self.relations.shape[0]

    @property
    def is_free(self) -> bool:
        return self.relations.shape[1] == 0

    def act(self, g: int) -> np.ndarray:
        return self.action[g]

    def structure(self) -> FgAbGroup:
        return cokernel_group(self.relations)[0]

    def check(self):
        n = self.rank
        for a in self.action:
            if a.shape != (n, n):
                raise ValueError("action matrices have the wrong size")
        sol = Solver(self.relations) if not self.is_free else None
        G = self.group
        if not self._mod_rel_zero(self.action[0] - identity(n), sol):
            raise ValueError("identity acts nontrivially")
        for g in range(G.order):
            if sol is not None and sol.solve(self.action[g] @ self.relations) is None:
                raise ValueError(f"element {g} does not preserve the relations")
        for g in G.generators:
            for h in range(G.order):
                d = self.action[g] @ self.action[h] - self.action[G.mul[g][h]]
                if not self._mod_rel_zero(d, sol):
                    raise ValueError("action is not a homomorphism")

    def _mod_rel_zero(self, d, sol) -> bool:
        if is_zero(d):
            return True
        return sol is not None and sol.solve(d) is not None

    def acts_trivially(self, H: SubgroupHandle | None = None) -> bool:
        els = H.generators if H is not None else self.group.generators
        sol = None if self.is_free else Solver(self.relations)
        return all(self._mod_rel_zero(self.action[g] - identity(self.rank), sol) for g in els)

    def __repr__(self):
        return f"<GModule {self.structure()} over group of order {self.group.order}>"


@dataclass
class Derived:
    """A module built from another, with maps between the two ambients.

    ``forward`` sends old ambient coordinates to new ones (where defined);
    ``back`` sends new coordinates to representatives in the old ambient.
    """

    module: GModule
    forward: np.ndarray | None
    back: np.ndarray | None


def _elements_of(M: GModule, H: SubgroupHandle | None):
    if H is None:
        return range(M.group.order), M.group.generators
    if H.group is not M.group:
        raise ValueError("subgroup of a different group")
    return H.elements, H.generators


def simplify(M: GModule) -> Derived:
    """Canonical presentation ℤ^k ⊕ ⨁ ℤ/dᵢ (torsion coordinates first)."""
    n = M.rank
    if M.is_free:
        return Derived(M, identity(n), identity(n))
    U, D, _ = smith_normal_form(M.relations)
    diag = diagonal(D) + [0] * (n - min(D.shape))
    tors = [i for i, d in enumerate(diag) if d > 1]
    free = [i for i, d in enumerate(diag) if d == 0]
    sel = tors + free
    Uinv = inverse(U)
    fwd = U[sel]
    back = Uinv[:, sel]
    rel = zeros(len(sel), len(tors))
    for c, i in enumerate(tors):
        rel[c, c] = diag[i]
    action = [fwd @ a @ back for a in M.action]
    out = GModule(M.group, action, rel, check=False)
    _reduce_action(out)
    return Derived(out, fwd, back)


def _reduce_action(M: GModule):
    # keep torsion rows reduced so matrices stay small
    k = M.relations.shape[1]
    for a in M.action:
        for i in range(k):
            d = M.relations[i, i]
            a[i] = [x % d for x in a[i]]


def submodule(M: GModule, basis, group_elements=None) -> Derived:
    """The free submodule spanned by the columns of ``basis`` (must be stable)."""
    B = intmat(basis, rows=M.rank)
    sol = Solver(B)
    action = []
    for a in M.action:
        c = sol.solve(a @ B) if B.shape[1] else zeros(0, 0)
        if c is None:
            raise ValueError("basis does not span a submodule")
        action.append(c)
    return Derived(GModule(M.group, action, check=False), None, B)


def quotient_module(M: GModule, sub) -> Derived:
    """``M / sub`` for a stable sublattice, as a simplified presentation."""
    S = intmat(sub, rows=M.rank)
    Q = GModule(M.group, M.action, hstack([M.relations, S], M.rank), check=False)
    d = simplify(Q)
    return d


def invariants_lattice(M: GModule, H: SubgroupHandle | None = None) -> np.ndarray:
    """Basis of ``{x : h x ≡ x mod relations for h ∈ H}`` (contains the relations)."""
    _, gens = _elements_of(M, H)
    n = M.rank
    if not gens:
        return identity(n)
    stack = np.concatenate([M.action[g] - identity(n) for g in gens], axis=0)
    R = block_diag([M.relations] * len(gens))
    return preimage(stack, R)


def invariants(M: GModule, H: SubgroupHandle | None = None) -> GModule:
    """``M^H``; the result carries the action of the normalizer of ``H``."""
    return invariants_derived(M, H).module


def invariants_derived(M: GModule, H: SubgroupHandle | None = None) -> Derived:
    L = invariants_lattice(M, H)
    G = M.group
    if H is None or H.is_normal:
        grp, elems = G, range(G.order)
    else:
        Nh = normalizer(G, H)
        grp, elems = Nh.as_group(), Nh.elements
    sol = Solver(L)
    action = [sol.solve_exact(M.action[g] @ L) for g in elems]
    rel = sol.solve_exact(M.relations) if not M.is_free else zeros(L.shape[1], 0)
    sub = GModule(grp, action, rel, check=False)
    if sub.is_free:
        return Derived(sub, None, L)
    d = simplify(sub)
    return Derived(d.module, None, L @ d.back)


def augmentation_generators(M: GModule, H: SubgroupHandle | None = None, all_elements=False):
    """Columns spanning 𝔄_H M (generators of H, or every element)."""
    elems, gens = _elements_of(M, H)
    use = [g for g in elems if g] if all_elements else list(gens)
    n = M.rank
    return hstack([M.action[g] - identity(n) for g in use], n)


def coinvariants_derived(M: GModule, H: SubgroupHandle | None = None,
                         residual: bool = True) -> Derived:
    n = M.rank
    rel = hstack([M.relations, augmentation_generators(M, H)], n)
    if residual and H is not None and H.order > 1:
        if not H.is_normal:
            raise NonNormalSubgroupForResidualAction("coinvariants with residual action need a normal subgroup")
        Q, _ = quotient_group(M.group, H)
        action = [M.action[r] for r in Q.representatives]
        Mq = GModule(Q, action, rel, check=False)
    else:
        Mq = GModule(M.group, M.action, rel, check=False)
    return simplify(Mq)


def coinvariants(M: GModule, H: SubgroupHandle | None = None, residual: bool = True) -> GModule:
    """``M_H = M / 𝔄_H M``.

    With ``residual`` and ``H`` normal, the result is a module over ``G/H``
    where each coset acts through its minimal-index representative.
    """
    return coinvariants_derived(M, H, residual).module


@dataclass
class NormData:
    norm: np.ndarray          # Σ_{h∈H} action(h)
    image: np.ndarray         # basis of N M (+ relations for presented modules)
    kernel: np.ndarray        # basis of {x : N x ≡ 0}
    augmentation: np.ndarray  # basis of 𝔄_H M (+ relations)


def norm_matrix(M: GModule, H: SubgroupHandle | None = None) -> np.ndarray:
    elems, _ = _elements_of(M, H)
    N = zeros(M.rank, M.rank)
    for g in elems:
        N = N + M.action[g]
    return N


def norm_data(M: GModule, H: SubgroupHandle | None = None) -> NormData:
    N = norm_matrix(M, H)
    n = M.rank
    return NormData(
        norm=N,
        image=image_basis(hstack([N, M.relations], n)),
        kernel=preimage(N, M.relations),
        augmentation=image_basis(hstack([augmentation_generators(M, H), M.relations], n)),
    )


def dual_module(M: GModule) -> GModule:
    """``Hom(M, ℤ)`` with ``(σf)(m) = f(σ⁻¹m)``; a lattice of rank ``rank(M/M_tors)``."""
    return dual_derived(M).module


def dual_derived(M: GModule) -> Derived:
    """``back`` holds the functionals (as vectors in the ambient dual) of the basis."""
    K = kernel_basis(M.relations.T.copy()) if not M.is_free else identity(M.rank)
    sol = Solver(K)
    G = M.group
    action = []
    for g in range(G.order):
        a = M.action[G.inv[g]].T
        action.append(sol.solve_exact(a @ K) if K.shape[1] else zeros(0, 0))
    return Derived(GModule(G, action, check=False), None, K)


def induced_module(d: int, G: FiniteMatrixGroup) -> GModule:
    """ℤᵈ[G]: block ``γ`` of size ``d`` is sent to block ``gγ``."""
    if d < 1:
        raise ValueError("d must be positive")
    m = G.order
    action = []
    for g in range(m):
        A = zeros(d * m, d * m)
        for c in range(m):
            t = G.mul[g][c]
            for i in range(d):
                A[t * d + i, c * d + i] = 1
        action.append(A)
    return GModule(G, action, check=False)


def restrict_action(M: GModule, H: SubgroupHandle) -> GModule:
    grp = H.as_group()
    return GModule(grp, [M.action[g] for g in H.elements], M.relations, check=False)


def change_group(M: GModule, G: FiniteMatrixGroup, images) -> GModule:
    """Pull back the action along ``images[g]`` (an index of ``M.group``)."""
    return GModule(G, [M.action[images[g]] for g in range(G.order)], M.relations, check=False)


@dataclass
class ModuleMap:
    """Equivariant map of ambient lattices ``source.rank -> target.rank``."""

    source: GModule
    target: GModule
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = intmat(self.matrix, rows=self.target.rank, cols=self.source.rank)
        if self.matrix.shape != (self.target.rank, self.source.rank):
            raise ValueError("map matrix has the wrong shape")

    def check(self):
        if self.source.group is not self.target.group:
            raise NonEquivariantMap("modules over different groups")
        sol = None if self.target.is_free else Solver(self.target.relations)

        def vanishes(x):
            return is_zero(x) or (sol is not None and sol.solve(x) is not None)

        if not self.source.is_free and not vanishes(self.matrix @ self.source.relations):
            raise NonEquivariantMap("map does not respect relations")
        for g in self.source.group.generators:
            d = self.matrix @ self.source.action[g] - self.target.action[g] @ self.matrix
            if not vanishes(d):
                raise NonEquivariantMap(f"map does not commute with generator {g}")
        return self


def random_unimodular(n: int, rng, steps: int = 6, bound: int = 2) -> np.ndarray:
    """A product of elementary matrices (and sign flips) with small entries."""
    P = identity(n)
    if n < 2:
        return intmat([[rng.choice((1, -1))]]) if n else P
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-bound, bound)
        P[i] += c * P[j]
    for i in range(n):
        if rng.random() < 0.3:
            P[i] = -P[i]
    return P


def conjugate_module(M: GModule, P) -> Derived:
    """Change of basis ``x ↦ P x`` of a lattice."""
    P = intmat(P)
    Pinv = inverse(P)
    out = GModule(M.group, [P @ a @ Pinv for a in M.action], P @ M.relations, check=False)
    return Derived(out, P, Pinv)


def direct_sum(*mods: GModule) -> GModule:
    G = mods[0].group
    action = [block_diag([m.action[g] for m in mods]) for g in range(G.order)]
    return GModule(G, action, block_diag([m.relations for m in mods]), check=False)


def parse_word(G: FiniteMatrixGroup, text: str) -> int:
    """Element named by a word such as ``"s*t^-1"`` (``"1"`` or ``""`` is the identity)."""
    text = text.replace(" ", "")
    if text in ("", "1", "e", "id"):
        return 0
    lookup = {name: k for k, name in enumerate(G.names)}
    g = 0
    for factor in text.split("*"):
        base, _, exp = factor.partition("^")
        if base not in lookup:
            raise GroupError(f"unknown generator {base!r} in word {text!r}")
        try:
            e = int(exp) if exp else 1
        except ValueError:
            raise GroupError(f"bad exponent in word {text!r}") from None
        g = G.mul[g][G.power(G.generators[lookup[base]], e)]
    return g
