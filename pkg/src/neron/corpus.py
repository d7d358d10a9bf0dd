"""Curated example documents and seeded random instances."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .gmod import (FiniteMatrixGroup, GModule, OrderBoundExceeded, SubgroupHandle,
                   close_group, coset_generated, normal_subgroups, random_unimodular)
from .intlat import intmat, inverse
from .schema import InputDocument, parse_document

SWAP = [[0, 1], [1, 0]]
P12 = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]
P123 = [[0, 0, 1], [1, 0, 0], [0, 1, 0]]
NEG_P12 = [[-x for x in row] for row in P12]


def _torus(name, rank, gens, inertia=(), frobenius=None, **extra):
    doc = {"name": name, "rank": rank,
           "galois": {"generators": [dict(zip(("name", "matrix"), g[:2]),
                                          **({"perm": g[2]} if len(g) > 2 else {}))
                                     for g in gens]},
           "inertia": list(inertia), "frobenius": frobenius}
    doc.update(extra)
    return doc


def _type_a_coroots(kind, n):
    from . import reductive
    return [list(c) for c in {"SL": reductive.sl, "PGL": reductive.pgl,
                              "GL": reductive.gl}[kind](n).coroots]


def builtin_raw() -> list[dict]:
    docs = [
        _torus("G_m", 1, [], frobenius="1"),
        _torus("split rank 3", 3, [], frobenius="1"),
        _torus("norm-one ramified quadratic", 1, [("s", [[-1]])], ["s"], "1"),
        _torus("norm-one unramified quadratic", 1, [("s", [[-1]])], [], "s"),
        _torus("Z[C2] ramified (mixed)", 2, [("s", SWAP)], ["s"], "1"),
        _torus("Weil restriction unramified quadratic", 2, [("s", SWAP)], [], "s"),
        _torus("G_m over ramified quadratic", 1, [("s", [[1]], SWAP)], ["s"], "1"),
        _torus("C4 rotation, inertia r^2", 2, [("r", [[0, -1], [1, 0]])], ["r^2"], "r"),
        _torus("S3 signed permutations, inertia A3", 3, [("a", NEG_P12), ("b", P123)],
               ["b"], "a"),
        _torus("D4 on Z^2, inertia rotations", 2,
               [("r", [[0, -1], [1, 0]]), ("s", [[1, 0], [0, -1]])], ["r"], "s"),
        _torus("order-6 rotation on hexagonal lattice", 2, [("r", [[1, -1], [1, 0]])],
               ["r^3"], "r"),
        _torus("augmentation SES over ramified quadratic", 2, [("s", SWAP)], ["s"], "1",
               ses={"t1": {"rank": 1, "images": [[[1]]]},
                    "t3": {"rank": 1, "images": [[[-1]]]},
                    "a": [[1], [-1]], "b": [[1, 1]]}),
        _torus("norm-one SES over ramified quadratic", 2, [("s", SWAP)], ["s"], "1",
               ses={"t1": {"rank": 1, "images": [[[-1]]]},
                    "t3": {"rank": 1, "images": [[[1]]]},
                    "a": [[1], [1]], "b": [[1, -1]]}),
        _torus("norm-one SES over unramified quadratic", 2, [("s", SWAP)], [], "s",
               ses={"t1": {"rank": 1, "images": [[[-1]]]},
                    "t3": {"rank": 1, "images": [[[1]]]},
                    "a": [[1], [1]], "b": [[1, -1]]}),
    ]
    for kind, n in (("SL", 2), ("PGL", 2), ("GL", 1), ("GL", 2), ("GL", 3), ("PGL", 3)):
        rank = n if kind == "GL" else n - 1
        docs.append(_torus(f"split {kind}{n}", rank, [], frobenius="1",
                           root_datum={"coroots": _type_a_coroots(kind, n)}))
    docs.append(_torus("quasi-split PU3, unramified", 2, [("f", SWAP)], [], "f",
                       root_datum={"coroots": _type_a_coroots("PGL", 3)}))
    docs.append(_torus("quasi-split PU3, ramified", 2, [("f", SWAP)], ["f"], "1",
                       root_datum={"coroots": _type_a_coroots("PGL", 3)}))
    return docs


def builtin_corpus(max_order: int | None = None) -> list[InputDocument]:
    kw = {} if max_order is None else {"max_order": max_order}
    return [parse_document(d, **kw) for d in builtin_raw()]


# ---------------------------------------------------------------------------
# random instances


@dataclass
class Instance:
    """A lattice with a finite group action, a normal subgroup with cyclic
    quotient, and a generator of that quotient."""

    name: str
    group: FiniteMatrixGroup
    module: GModule
    inertia: SubgroupHandle
    frobenius: int

    def dump(self) -> dict:
        G = self.group
        return {"name": self.name,
                "generators": [G.matrices[s].tolist() for s in G.generators],
                "inertia": [G.matrices[g].tolist() for g in self.inertia.generators],
                "frobenius": G.matrices[self.frobenius].tolist()}

    def torus(self):
        from .torus import TorusModel
        return TorusModel(self.module, self.inertia, self.frobenius, self.name)


CURATED_GL2 = {
    "C3": [[[0, -1], [1, -1]]],
    "C6": [[[1, -1], [1, 0]]],
    "D6": [[[1, -1], [1, 0]], [[0, 1], [1, 0]]],
}


def random_signed_permutation(n: int, rng: random.Random):
    perm = list(range(n))
    rng.shuffle(perm)
    m = [[0] * n for _ in range(n)]
    for i, p in enumerate(perm):
        m[p][i] = rng.choice((1, -1))
    return m


def random_group(rng: random.Random, max_rank: int = 5, max_order: int = 12):
    """A finite subgroup of GL_n(ℤ): random signed permutations, or a curated
    GL_2(ℤ) group, conjugated by a random unimodular matrix."""
    while True:
        if max_order == 1:
            return close_group([intmat([[1]])])
        if rng.random() < 0.2 and max_order >= 12:
            key = rng.choice(sorted(CURATED_GL2))
            gens = [intmat(g) for g in CURATED_GL2[key]]
            n = 2
        else:
            n = rng.randint(1, max_rank)
            gens = [intmat(random_signed_permutation(n, rng)) for _ in range(rng.randint(1, 2))]
        P = random_unimodular(n, rng)
        Pinv = inverse(P)
        gens = [P @ g @ Pinv for g in gens]
        try:
            G = close_group(gens, max_order=max_order)
        except OrderBoundExceeded:
            continue
        return G


def random_instance(rng: random.Random, index: int, max_rank: int = 5,
                    max_order: int = 12) -> Instance:
    G = random_group(rng, max_rank, max_order)
    choices = []
    for H in normal_subgroups(G):
        gens = [g for g in range(G.order) if coset_generated(G, H, g)]
        if gens:
            choices.append((H, gens[0]))
    H, frob = choices[rng.randrange(len(choices))]
    M = GModule(G, G.matrices, check=False)
    return Instance(f"random-{index}", G, M, H, frob)


def random_instances(seed: int, count: int, max_rank: int = 5,
                     max_order: int = 12) -> list[Instance]:
    rng = random.Random(seed)
    return [random_instance(rng, i, max_rank, max_order) for i in range(count)]
