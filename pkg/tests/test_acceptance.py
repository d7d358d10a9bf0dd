"""Acceptance criteria; `pytest tests/test_acceptance.py` prints a PASS/FAIL line for each."""
import random
import shutil
import subprocess
import sys
import time

import pytest

from neron.corpus import random_instances
from neron.gcoh import lemma21_sequence, tate
from neron.gmod import dual_module, induced_module, subgroups, whole
from neron.intlat import FgAbGroup
from neron.localfield import DivisibleGroup, ResidueFieldMode, local_cohomology
from neron.reductive import abelian_cohomology, gl, h1_reductive, pgl, sl
from neron.torus import canonical_resolution, component_group, six_term
from neron.verify import Config, Verifier, _random_basis_variant

QF = ResidueFieldMode()
criterion = pytest.mark.criterion


@pytest.fixture(scope="session")
def suites():
    """One default verify run (seed 0), shared by the criteria below."""
    return {s.name: s for s in Verifier(Config(seed=0)).run()}


@pytest.fixture(scope="session")
def instances():
    return random_instances(0, 200, 5, 12)


def assert_suites(suites, *names):
    for name in names:
        s = suites[name]
        assert s.cases > 0 and s.passed, (name, s.failures, s.counterexample)


@criterion(1, "duality of Tate groups on 200 seeded instances in under 120 s")
def test_duality(instances, suites):
    start = time.perf_counter()
    count = 0
    for inst in instances:
        M, D, J = inst.module, dual_module(inst.module), inst.inertia
        for r in range(-2, 3):
            assert tate(M, r, J).group == tate(D, -r, J).group, (inst.name, r)
            count += 1
    assert count == 1000
    assert time.perf_counter() - start < 120
    assert_suites(suites, "gcoh.duality")


@criterion(2, "restriction sequence exact with kernel order |H^1|")
def test_lemma21(instances, suites):
    for inst in instances:
        res = lemma21_sequence(inst.module, inst.inertia)
        assert res.exact
        assert res.q.kernel().order == tate(inst.module, 1, inst.inertia).group.order
    assert_suites(suites, "gcoh.lemma21")


@criterion(3, "component group bookkeeping, resolution route, worked norm-one case")
def test_component_groups(tori, instances, suites):
    for T in list(tori.values()) + [i.torus() for i in instances[:60]]:
        cg = component_group(T)
        assert cg.structure.torsion_order == tate(T.char_module, 1, T.inertia).group.order
        assert all(cg.checks.values())
        if T.rank <= 5:
            assert canonical_resolution(T).ok
    T = tori["norm-one ramified quadratic"]
    res = canonical_resolution(T)
    assert str(component_group(T).structure) == "Z/2"
    assert [abs(int(x)) for x in res.phi_p_to_q.matrix.flatten()] == [2]
    assert str(res.phi_p_to_q.source) == str(res.phi_p_to_q.target) == "Z"
    assert str(res.phi_q_to_t.target) == "Z/2" and res.phi_q_to_t.is_surjective()
    assert_suites(suites, "torus.component_sequence", "torus.canonical_resolution",
                  "torus.worked_norm_one_ramified")


@criterion(4, "induced modules are cohomologically trivial; H^1 of the resolving torus vanishes")
def test_shapiro(instances, tori, suites):
    seen = set()
    for inst in instances:
        G = inst.group
        key = tuple(map(tuple, G.mul))
        if G.order > 8 or key in seen:
            continue
        seen.add(key)
        for d in (1, 2):
            R = induced_module(d, G)
            for J in subgroups(G):
                assert all(tate(R, r, J).group.is_trivial for r in range(-3, 4))
    assert len(seen) > 3
    for T in tori.values():
        Q = canonical_resolution(T).Q
        assert tate(Q.char_module, 1, Q.inertia).group.is_trivial
    assert_suites(suites, "gcoh.shapiro", "torus.canonical_resolution")


@criterion(5, "six-term sequence: curated objects, 20 random bases, torsion-free injectivity")
def test_six_term(docs, suites):
    base = docs["norm-one SES over ramified quadratic"].ses()
    rep = six_term(*base)
    assert [g.order for g in rep.h2] == [1, 1, 2]
    assert [str(g) for g in rep.phi] == ["Z/2", "Z", "Z"]
    assert rep.ok
    rng = random.Random(0)
    for _ in range(20):
        rep = six_term(*_random_basis_variant(*base, rng))
        assert rep.ok and [str(g) for g in rep.phi] == ["Z/2", "Z", "Z"]
    injective = 0
    for d in docs.values():
        if d.kind == "ses":
            rep = six_term(*d.ses())
            assert rep.ok
            if "torsion_free_injective" in rep.checks:
                injective += 1
                assert rep.kernel_order == 1
    assert injective > 0
    assert_suites(suites, "torus.six_term_curated", "torus.six_term_random_bases",
                  "torus.six_term_unit_sequences")


@criterion(6, "classical local-field values and vanishing in degrees 3 and 4")
def test_local_field(tori, instances, suites):
    gm = tori["G_m"]
    assert local_cohomology(gm, QF, 1).result == FgAbGroup()
    assert local_cohomology(gm, QF, 2).result == DivisibleGroup(1)
    assert local_cohomology(tori["norm-one ramified quadratic"], QF, 1).result == \
        FgAbGroup(0, (2,))
    for T in list(tori.values()) + [i.torus() for i in instances]:
        for r in (3, 4):
            assert local_cohomology(T, QF, r).result.is_trivial
    assert_suites(suites, "localfield.classical", "localfield.degree_vanishing")


@criterion(7, "type A reductive groups up to n = 5 and the two-step route")
def test_reductive(suites):
    for n in range(1, 6):
        for rd, h1 in ((sl(n), FgAbGroup()), (pgl(n), FgAbGroup(0, (n,) if n > 1 else ())),
                       (gl(n), FgAbGroup())):
            assert h1_reductive(rd, whole(rd.group), QF, 0) == h1
        g = gl(n)
        assert abelian_cohomology(g, whole(g.group), QF, 2, 0).result == DivisibleGroup(1)
    assert_suites(suites, "reductive.type_a", "reductive.two_step_coinvariants")


@criterion(8, "every invariant factor of every Tate group divides |J|")
def test_annihilation(instances, suites):
    for inst in instances[:80]:
        for J in subgroups(inst.group):
            for r in range(-3, 4):
                g = tate(inst.module, r, J).group
                assert g.is_finite and all(J.order % d == 0 for d in g.invariant_factors)
    assert_suites(suites, "gcoh.annihilation")


@criterion(9, "`neron verify --seed 0` exits 0 in under 5 minutes")
def test_end_to_end():
    exe = shutil.which("neron")
    cmd = [exe] if exe else [sys.executable, "-m", "neron.cli"]
    start = time.perf_counter()
    proc = subprocess.run(cmd + ["verify", "--seed", "0"], capture_output=True, text=True,
                          timeout=300)
    assert proc.returncode == 0, proc.stdout[-2000:] + proc.stderr[-2000:]
    assert time.perf_counter() - start < 300
