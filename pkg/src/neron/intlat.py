"""Exact integer linear algebra.

Matrices are numpy arrays with ``dtype=object`` holding Python ints, so every
intermediate value is arbitrary precision.  Vectors are columns: a lattice is
described by a matrix whose columns generate it.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import gcd, prod

import numpy as np


def intmat(data, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce ``data`` to an exact integer matrix.

    Accepts nested sequences of ints or decimal strings.  ``rows``/``cols``
    give the shape of an empty matrix, which numpy cannot infer.
    """
    if isinstance(data, np.ndarray) and data.dtype == object and data.ndim == 2:
        return data
    arr = np.array(data, dtype=object)
    if arr.size == 0:
        r = rows if rows is not None else (arr.shape[0] if arr.ndim >= 1 else 0)
        c = cols if cols is not None else (arr.shape[1] if arr.ndim == 2 else 0)
        return np.zeros((r, c), dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = int(v)
    return out


def identity(n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=object)
    for i in range(n):
        out[i, i] = 1
    return out


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=object)


def hstack(mats, rows: int) -> np.ndarray:
    mats = [m for m in mats if m.shape[1]]
    if not mats:
        return zeros(rows, 0)
    return np.concatenate(mats, axis=1)


def block_diag(mats) -> np.ndarray:
    r = sum(m.shape[0] for m in mats)
    c = sum(m.shape[1] for m in mats)
    out = zeros(r, c)
    i = j = 0
    for m in mats:
        out[i:i + m.shape[0], j:j + m.shape[1]] = m
        i += m.shape[0]
        j += m.shape[1]
    return out


def mat_key(a: np.ndarray) -> tuple:
    return tuple(tuple(int(x) for x in row) for row in a)


def is_zero(a: np.ndarray) -> bool:
    return not any(a.flat)


def determinant(a: np.ndarray) -> int:
    """Bareiss fraction-free determinant."""
    a = intmat(a).copy()
    n = a.shape[0]
    if n != a.shape[1]:
        raise ValueError("determinant of a non-square matrix")
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k, k] == 0:
            for i in range(k + 1, n):
                if a[i, k] != 0:
                    a[[k, i]] = a[[i, k]]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i, j] = (a[i, j] * a[k, k] - a[i, k] * a[k, j]) // prev
        prev = a[k, k]
    return sign * a[n - 1, n - 1] if n else 1


# ---------------------------------------------------------------------------
# Smith normal form


def _pivot(a: np.ndarray, t: int):
    best = None
    m, n = a.shape
    for i in range(t, m):
        row = a[i]
        for j in range(t, n):
            v = row[j]
            if v and (best is None or abs(v) < best[0]):
                best = (abs(v), i, j)
                if best[0] == 1:
                    return best
    return best


def smith_normal_form(A) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(U, D, V)`` with ``U @ A @ V == D`` in Smith normal form.

    ``U`` and ``V`` are unimodular; the diagonal of ``D`` is nonnegative and
    each entry divides the next.  Pivots are chosen as the smallest nonzero
    entry by magnitude, first in row-major order, so the output is a pure
    function of the input.
    """
    a = intmat(A).copy()
    m, n = a.shape
    U, V = identity(m), identity(n)
    t = 0
    while t < min(m, n):
        piv = _pivot(a, t)
        if piv is None:
            break
        _, i, j = piv
        if i != t:
            a[[t, i]] = a[[i, t]]
            U[[t, i]] = U[[i, t]]
        if j != t:
            a[:, [t, j]] = a[:, [j, t]]
            V[:, [t, j]] = V[:, [j, t]]
        while True:
            p = a[t, t]
            clean = True
            for i in range(t + 1, m):
                if a[i, t]:
                    q = a[i, t] // p
                    a[i] -= q * a[t]
                    U[i] -= q * U[t]
                    if a[i, t]:
                        clean = False
            for j in range(t + 1, n):
                if a[t, j]:
                    q = a[t, j] // p
                    a[:, j] -= q * a[:, t]
                    V[:, j] -= q * V[:, t]
                    if a[t, j]:
                        clean = False
            if not clean:
                # move the smallest remainder in row/column t onto the pivot
                best = None
                for i in range(t + 1, m):
                    if a[i, t] and (best is None or abs(a[i, t]) < best[0]):
                        best = (abs(a[i, t]), i, None)
                for j in range(t + 1, n):
                    if a[t, j] and (best is None or abs(a[t, j]) < best[0]):
                        best = (abs(a[t, j]), None, j)
                _, i, j = best
                if i is not None:
                    a[[t, i]] = a[[i, t]]
                    U[[t, i]] = U[[i, t]]
                else:
                    a[:, [t, j]] = a[:, [j, t]]
                    V[:, [t, j]] = V[:, [j, t]]
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i, j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            a[t] += a[bad]
            U[t] += U[bad]
        if a[t, t] < 0:
            a[t] = -a[t]
            U[t] = -U[t]
        t += 1
    return U, a, V


def diagonal(D: np.ndarray) -> list[int]:
    return [int(D[i, i]) for i in range(min(D.shape))]


def matrix_rank(A) -> int:
    _, D, _ = smith_normal_form(A)
    return sum(1 for d in diagonal(D) if d)


# ---------------------------------------------------------------------------
# Column echelon form: images, kernels, membership


def column_echelon(A) -> tuple[np.ndarray, np.ndarray, int]:
    """Column Hermite form.  Returns ``(E, V, r)`` with ``A @ V == E``.

    The first ``r`` columns of ``E`` are a basis of the column span in
    reduced echelon shape; the last columns of ``V`` span the kernel.
    """
    e = intmat(A).copy()
    m, n = e.shape
    V = identity(n)
    k = 0
    for i in range(m):
        if k == n:
            break
        while True:
            nz = [j for j in range(k, n) if e[i, j]]
            if not nz:
                break
            j0 = min(nz, key=lambda j: (abs(e[i, j]), j))
            if j0 != k:
                e[:, [k, j0]] = e[:, [j0, k]]
                V[:, [k, j0]] = V[:, [j0, k]]
            done = True
            for j in range(k + 1, n):
                if e[i, j]:
                    q = e[i, j] // e[i, k]
                    e[:, j] -= q * e[:, k]
                    V[:, j] -= q * V[:, k]
                    if e[i, j]:
                        done = False
            if done:
                break
        if not e[i, k]:
            continue
        if e[i, k] < 0:
            e[:, k] = -e[:, k]
            V[:, k] = -V[:, k]
        p = e[i, k]
        for j in range(k):
            q = e[i, j] // p
            if q:
                e[:, j] -= q * e[:, k]
                V[:, j] -= q * V[:, k]
        k += 1
    return e, V, k


def image_basis(A) -> np.ndarray:
    """A basis (as columns, in echelon form) of the column span of ``A``."""
    A = intmat(A)
    E, _, r = column_echelon(A)
    return E[:, :r].copy()


def kernel_basis(A) -> np.ndarray:
    """Columns forming a ℤ-basis of ``{x : A x = 0}`` (a saturated lattice)."""
    A = intmat(A)
    _, V, r = column_echelon(A)
    K = V[:, r:]
    if K.shape[1] == 0:
        return zeros(A.shape[1], 0)
    # canonical (Hermite) basis of the same lattice
    return _row_hermite(K.T.copy()).T.copy()


def _row_hermite(M: np.ndarray) -> np.ndarray:
    """Row Hermite form of ``M`` (rows span the same lattice), zero rows dropped."""
    E, _, r = column_echelon(M.T.copy())
    return E[:, :r].T.copy()


def saturation(A) -> np.ndarray:
    """Basis of the saturation (ℚ-span ∩ ℤⁿ) of the column span of ``A``."""
    A = intmat(A)
    n = A.shape[0]
    if A.shape[1] == 0:
        return zeros(n, 0)
    # the saturation is the kernel of a basis of the annihilator
    ann = kernel_basis(A.T.copy())
    return kernel_basis(ann.T.copy()) if ann.shape[1] else identity(n)


class Solver:
    """Solve ``A x = b`` over ℤ for many right-hand sides ``b``."""

    def __init__(self, A):
        self.A = intmat(A)
        self.U, D, self.V = smith_normal_form(self.A)
        self.d = [x for x in diagonal(D) if x]
        self.rank = len(self.d)

    def solve(self, b) -> np.ndarray | None:
        """One integral solution (column), or ``None`` if there is none."""
        b = intmat(b)
        y = self.U @ b
        r = self.rank
        if any(y[r:].flat):
            return None
        x = zeros(self.A.shape[1], b.shape[1])
        for i, d in enumerate(self.d):
            for c in range(b.shape[1]):
                q, rem = divmod(y[i, c], d)
                if rem:
                    return None
                x[i, c] = q
        return self.V @ x

    def solve_exact(self, b) -> np.ndarray:
        x = self.solve(b)
        if x is None:
            raise ArithmeticError("vector outside the lattice")
        return x


def in_span(A, b) -> bool:
    return Solver(A).solve(b) is not None


def preimage(A, R) -> np.ndarray:
    """Basis of ``{x : A x ∈ colspan(R)}``."""
    A, R = intmat(A), intmat(R, rows=intmat(A).shape[0])
    n = A.shape[1]
    if R.shape[1] == 0:
        return kernel_basis(A)
    K = kernel_basis(hstack([A, -R], A.shape[0]))
    return image_basis(K[:n])


def extend_to_basis(B) -> np.ndarray:
    """Complete a basis of a saturated sublattice to a unimodular matrix."""
    B = intmat(B)
    n, k = B.shape
    U, D, V = smith_normal_form(B)
    if any(d != 1 for d in diagonal(D)[:k]):
        raise ValueError("sublattice is not saturated")
    Uinv = _inverse_unimodular(U)
    # B = Uinv D V^-1; columns of Uinv beyond k complete B
    return hstack([B, Uinv[:, k:]], n)


def _inverse_unimodular(U: np.ndarray) -> np.ndarray:
    n = U.shape[0]
    X = Solver(U).solve(identity(n))
    if X is None:
        raise ValueError("matrix is not unimodular")
    return X


def inverse(U) -> np.ndarray:
    return _inverse_unimodular(intmat(U))


# ---------------------------------------------------------------------------
# Finitely generated abelian groups


@dataclass(frozen=True)
class FgAbGroup:
    """ℤ^rank ⊕ ⨁ ℤ/dᵢ with d₁ | d₂ | …, each dᵢ ≥ 2."""

    rank: int = 0
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        f = tuple(int(d) for d in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", f)
        if self.rank < 0 or any(d < 2 for d in f):
            raise ValueError(f"bad abelian group data {self.rank}, {f}")
        if any(f[i + 1] % f[i] for i in range(len(f) - 1)):
            raise ValueError(f"invariant factors {f} do not form a divisibility chain")

    @classmethod
    def from_orders(cls, rank: int, orders) -> "FgAbGroup":
        """Canonical form of ℤ^rank ⊕ ⨁ ℤ/oᵢ for arbitrary cyclic orders."""
        orders = [abs(int(o)) for o in orders]
        rank += sum(1 for o in orders if o == 0)
        orders = [o for o in orders if o > 1]
        if not orders:
            return cls(rank)
        diag = zeros(len(orders), len(orders))
        for i, o in enumerate(orders):
            diag[i, i] = o
        _, D, _ = smith_normal_form(diag)
        return cls(rank, tuple(d for d in diagonal(D) if d > 1))

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.invariant_factors

    @property
    def order(self) -> int | None:
        return prod(self.invariant_factors) if self.rank == 0 else None

    @property
    def torsion_order(self) -> int:
        return prod(self.invariant_factors)

    @property
    def exponent(self) -> int | None:
        if self.rank:
            return None
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def torsion(self) -> "FgAbGroup":
        return FgAbGroup(0, self.invariant_factors)

    def __add__(self, other: "FgAbGroup") -> "FgAbGroup":
        return FgAbGroup.from_orders(self.rank + other.rank,
                                     self.invariant_factors + other.invariant_factors)

    def to_json(self) -> dict:
        return {"rank": self.rank, "invariant_factors": list(self.invariant_factors)}

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.invariant_factors]
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        return " + ".join(parts) if parts else "0"


class Subquotient:
    """The abelian group ``L / S`` for lattices ``S ⊆ L ⊆ ℤⁿ``.

    ``cycles`` is a basis of ``L``; ``boundaries`` generates ``S``.  Elements
    of ``L`` are mapped to canonical coordinates: first the torsion
    coordinates (reduced mod the invariant factors) then the free ones.
    """

    def __init__(self, cycles, boundaries):
        self.cycles = intmat(cycles)
        n = self.cycles.shape[0]
        self.boundaries = intmat(boundaries, rows=n)
        self.ambient = n
        self._lsolve = Solver(self.cycles)
        k = self.cycles.shape[1]
        if self._lsolve.rank != k:
            raise ValueError("cycle matrix must have independent columns")
        C = self._lsolve.solve(self.boundaries) if self.boundaries.shape[1] else zeros(k, 0)
        if C is None:
            raise ValueError("boundaries do not lie in the cycle lattice")
        U, D, _ = smith_normal_form(C)
        diag = diagonal(D) + [0] * (k - min(D.shape))
        self._U = U
        self._positions = [i for i, d in enumerate(diag) if d != 1]
        self.moduli = [diag[i] for i in self._positions]  # 0 = free coordinate
        self.group = FgAbGroup(sum(1 for d in self.moduli if d == 0),
                               tuple(d for d in self.moduli if d))
        Uinv = inverse(U) if k else zeros(0, 0)
        self.generators = self.cycles @ Uinv[:, self._positions] if k else zeros(n, 0)

    def coefficients(self, v) -> np.ndarray:
        x = self._lsolve.solve(intmat(v))
        if x is None:
            raise ValueError("element does not lie in the cycle lattice")
        return x

    def coords(self, v) -> np.ndarray:
        """Canonical coordinates of the classes of the columns of ``v``."""
        v = intmat(v, rows=self.ambient)
        if v.shape[1] == 0:
            return zeros(len(self.moduli), 0)
        y = (self._U @ self.coefficients(v))[self._positions]
        for i, d in enumerate(self.moduli):
            if d:
                y[i] = y[i] % d
        return y

    def contains(self, v) -> bool:
        return self._lsolve.solve(intmat(v)) is not None

    def is_zero(self, v) -> bool:
        return is_zero(self.coords(v))


def reduce_coords(y: np.ndarray, moduli) -> np.ndarray:
    y = y.copy()
    for i, d in enumerate(moduli):
        if d:
            y[i] = y[i] % d
    return y


def _relation_matrix(moduli) -> np.ndarray:
    cols = [i for i, d in enumerate(moduli) if d]
    R = zeros(len(moduli), len(cols))
    for c, i in enumerate(cols):
        R[i, c] = moduli[i]
    return R


class AbHom:
    """A homomorphism between groups given in canonical coordinates.

    ``source_moduli``/``target_moduli`` list the order of each coordinate
    (0 for a free one) and ``matrix`` sends source generators to target
    coordinates.
    """

    def __init__(self, source_moduli, target_moduli, matrix):
        self.source_moduli = list(source_moduli)
        self.target_moduli = list(target_moduli)
        m = intmat(matrix, rows=len(self.target_moduli), cols=len(self.source_moduli))
        self.matrix = reduce_coords(m, self.target_moduli)
        if any(self.matrix[:, j].any() and d and not _kills(self.matrix[:, j] * d,
                                                            self.target_moduli)
               for j, d in enumerate(self.source_moduli)):
            raise ValueError("matrix does not define a homomorphism")

    @classmethod
    def between(cls, source: Subquotient, target: Subquotient, ambient_map) -> "AbHom":
        """Map induced on subquotients by a map of ambient lattices."""
        images = intmat(ambient_map) @ source.generators
        return cls(source.moduli, target.moduli, target.coords(images))

    @property
    def source(self) -> FgAbGroup:
        return _group(self.source_moduli)

    @property
    def target(self) -> FgAbGroup:
        return _group(self.target_moduli)

    def _target_rel(self):
        return _relation_matrix(self.target_moduli)

    def image(self) -> FgAbGroup:
        n = len(self.target_moduli)
        rel = self._target_rel()
        span = image_basis(hstack([self.matrix, rel], n))
        return Subquotient(span, rel).group

    def cokernel(self) -> FgAbGroup:
        n = len(self.target_moduli)
        return cokernel_group(hstack([self.matrix, self._target_rel()], n))[0]

    def kernel_lattice(self) -> np.ndarray:
        return preimage(self.matrix, self._target_rel())

    def kernel(self) -> FgAbGroup:
        lat = self.kernel_lattice()
        return Subquotient(lat, _relation_matrix(self.source_moduli)).group

    def is_zero(self) -> bool:
        return is_zero(self.matrix)

    def is_injective(self) -> bool:
        return self.kernel().is_trivial

    def is_surjective(self) -> bool:
        return self.cokernel().is_trivial

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def __matmul__(self, other: "AbHom") -> "AbHom":
        if len(other.target_moduli) != len(self.source_moduli):
            raise ValueError("incompatible homomorphisms")
        return AbHom(other.source_moduli, self.target_moduli, self.matrix @ other.matrix)


def _kills(col, moduli) -> bool:
    return all((d and c % d == 0) or (not d and c == 0) for c, d in zip(col, moduli))


def _group(moduli) -> FgAbGroup:
    return FgAbGroup.from_orders(sum(1 for d in moduli if d == 0), [d for d in moduli if d])


def exact_at(f: AbHom, g: AbHom) -> bool:
    """Whether ``A -f-> B -g-> C`` is exact at ``B``.

    Uses that ``g∘f = 0`` gives a surjection ``coker f ↠ im g``, which is an
    isomorphism iff the two groups are isomorphic (f.g. abelian groups are
    Hopfian).
    """
    return (g @ f).is_zero() and f.cokernel() == g.image()


def cokernel_group(A) -> tuple[FgAbGroup, Subquotient]:
    """ℤ^rows / colspan(A), with the projection to canonical coordinates."""
    A = intmat(A)
    n = A.shape[0]
    sq = Subquotient(identity(n), A)
    return sq.group, sq


def gcd_of_minors(A, k: int) -> int:
    """gcd of all k×k minors (brute force; an oracle for small matrices)."""
    from itertools import combinations
    A = intmat(A)
    m, n = A.shape
    if k == 0:
        return 1
    vals = [determinant(A[np.ix_(r, c)]) for r in combinations(range(m), k)
            for c in combinations(range(n), k)]
    return reduce(gcd, vals, 0)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """``(g, x, y)`` with ``x*a + y*b == g == gcd(a, b) >= 0``."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


class EchelonLattice:
    """Incrementally grown sublattice of ℤⁿ kept in row echelon form.

    Cheap membership tests for a lattice that is built one vector at a time.
    """

    __slots__ = ("n", "rows")

    def __init__(self, n: int):
        self.n = n
        self.rows: dict[int, list[int]] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def __contains__(self, vec) -> bool:
        v = list(vec)
        for j in range(self.n):
            if v[j]:
                r = self.rows.get(j)
                if r is None or v[j] % r[j]:
                    return False
                q = v[j] // r[j]
                for t in range(j, self.n):
                    v[t] -= q * r[t]
        return True

    def add(self, vec) -> bool:
        """Add a vector; returns whether the lattice grew."""
        v = list(vec)
        grew = False
        j = 0
        while j < self.n:
            if not v[j]:
                j += 1
                continue
            r = self.rows.get(j)
            if r is None:
                if v[j] < 0:
                    v = [-x for x in v]
                self.rows[j] = v
                return True
            a, b = r[j], v[j]
            if b % a == 0:
                q = b // a
                v = [x - q * y for x, y in zip(v, r)]
            else:
                g, x, y = xgcd(a, b)
                self.rows[j] = [x * p + y * w for p, w in zip(r, v)]
                v = [(a // g) * w - (b // g) * p for p, w in zip(r, v)]
                grew = True
            j += 1
        return grew
