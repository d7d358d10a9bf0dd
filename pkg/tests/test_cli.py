import io
import json

import pytest

from neron import cli
from neron.corpus import builtin_raw
from neron.verify import SuiteResult

RAW = {r["name"]: r for r in builtin_raw()}


@pytest.fixture
def write(tmp_path):
    def _write(obj, name="in.json"):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)
    return _write


def call(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out), out


def test_component_group(capsys, write):
    code, rep, _ = call(capsys, "component-group", "-i", write(RAW["norm-one ramified quadratic"]))
    assert code == 0
    assert rep["results"]["phi"] == {"rank": 0, "invariant_factors": [2]}
    assert rep["timing"] is None and rep["command"] == "component-group"
    assert all(c["passed"] for c in rep["checks"])


def test_local_cohomology_degrees(capsys, write):
    path = write(RAW["G_m"])
    code, rep, _ = call(capsys, "local-cohomology", "-i", path, "-r", "2")
    assert code == 0 and rep["results"]["degrees"] == {"2": {"divisible_rank": 1}}
    code, rep, _ = call(capsys, "local-cohomology", "-i", path)
    assert sorted(rep["results"]["degrees"]) == ["1", "2", "3"]
    code, rep, _ = call(capsys, "local-cohomology", "-i", path, "--mode", "cd2", "-r", "3")
    assert code == 0 and "symbolic" in rep["results"]["degrees"]["3"]


@pytest.mark.parametrize("command, name", [
    ("reduction-type", "Z[C2] ramified (mixed)"),
    ("resolve", "norm-one ramified quadratic"),
    ("six-term", "norm-one SES over ramified quadratic"),
    ("reductive-h1", "quasi-split PU3, ramified"),
    ("abelian-cohomology", "split GL2"),
    ("is-flasque", "Weil restriction unramified quadratic"),
    ("is-flasque", "split PGL2"),
])
def test_commands_succeed(capsys, write, command, name):
    code, rep, _ = call(capsys, command, "-i", write(RAW[name]))
    assert code == 0, rep
    assert rep["results"] is not None and "error" not in rep


def test_six_term_values(capsys, write):
    _, rep, _ = call(capsys, "six-term", "-i", write(RAW["norm-one SES over ramified quadratic"]))
    assert [g["invariant_factors"] for g in rep["results"]["phi"]] == [[2], [], []]


def test_input_errors(capsys, write, tmp_path):
    code, rep, _ = call(capsys, "component-group", "-i", write({"rank": 1}))
    assert code == 1 and rep["error"]["kind"] == "SchemaError"
    code, rep, _ = call(capsys, "component-group")
    assert code == 1
    bad = {"rank": 1, "galois": {"generators": [{"matrix": [[2]]}]}}
    code, rep, _ = call(capsys, "component-group", "-i", write(bad))
    assert code == 1 and rep["error"]["kind"] == "NonUnimodularGenerator"
    # a torus document where a root datum is expected
    code, rep, _ = call(capsys, "reductive-h1", "-i", write(RAW["G_m"]))
    assert code == 1
    code, rep, _ = call(capsys, "local-cohomology", "-i", write(RAW["G_m"]), "-r", "0")
    assert code == 1 and rep["error"]["kind"] == "InvalidDegree"
    code, rep, _ = call(capsys, "local-cohomology", "-i", write(RAW["G_m"]), "--mode", "xyz")
    assert code == 1


@pytest.mark.parametrize("config", [
    {"bogus": 1}, {"max_order": -1}, {"degree_window": [1, 2]}, [], "{nope",
])
def test_config_errors(capsys, tmp_path, config):
    p = tmp_path / "cfg.json"
    p.write_text(config if isinstance(config, str) else json.dumps(config))
    code, rep, _ = call(capsys, "corpus", "--config", str(p))
    assert code == 1 and "config" in rep["error"]["message"]


def test_computation_error_exit_code(monkeypatch):
    def boom(doc, args, cfg):
        raise ArithmeticError("overflow")
    monkeypatch.setitem(cli.HANDLERS, "corpus", boom)
    rep, code = cli.run("corpus", None, cli.Config())
    assert code == 2 and rep["error"]["kind"] == "ArithmeticError"


def test_failed_check_exit_codes(monkeypatch):
    monkeypatch.setitem(cli.HANDLERS, "corpus",
                        lambda doc, args, cfg: ({}, [cli._check("x", False)]))
    assert cli.run("corpus", None, cli.Config())[1] == 2
    monkeypatch.setattr(cli, "run_verify", lambda cfg: [SuiteResult("s", cases=1, failures=1)])
    rep, code = cli.run("verify", None, cli.Config())
    assert code == 3 and rep["results"]["failed"] == 1


def test_small_verify_run(capsys, tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"max_order": 2, "corpus_size": 5}))
    code, rep, _ = call(capsys, "verify", "--config", str(p), "--seed", "3")
    assert code == 0 and rep["results"]["seed"] == 3 and rep["results"]["failed"] == 0


def test_output_formats_and_determinism(capsys, write):
    path = write(RAW["C4 rotation, inertia r^2"])
    _, rep1, out1 = call(capsys, "component-group", "-i", path)
    _, rep2, out2 = call(capsys, "component-group", "-i", path)
    assert out1 == out2 and out1.count("\n") == 1
    _, rep3, out3 = call(capsys, "component-group", "-i", path, "--pretty")
    assert rep3 == rep1 and out3.count("\n") > 1
    _, rep4, _ = call(capsys, "component-group", "-i", path, "--timing")
    assert rep4["timing"]["seconds"] >= 0


def test_stdin(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(RAW["G_m"])))
    code, rep, _ = call(capsys, "reduction-type", "-i", "-")
    assert code == 0 and rep["input"]["name"] == "G_m"


def test_corpus_command(capsys):
    code, rep, _ = call(capsys, "corpus")
    assert code == 0 and len(rep["results"]["documents"]) == len(RAW)


def test_is_flasque_uses_cocharacters(capsys, write):
    # norm-one torus of a biquadratic extension: H¹ of X* and X_* differ on the full group
    from neron.gcoh import tate
    from neron.gmod import GModule, subgroups
    from neron.reductive import is_flasque
    from neron.torus import cocharacters, norm_one, torus_from_generators
    V4 = torus_from_generators([[[-1, 0], [0, 1]], [[1, 0], [0, -1]]], inertia=[])
    N = norm_one(V4.with_module(GModule.trivial(V4.galois)))
    G = N.galois
    raw = {"rank": N.rank, "inertia": [],
           "galois": {"generators": [{"matrix": N.char_module.action[g].tolist()}
                                     for g in G.generators]}}
    _, rep, _ = call(capsys, "is-flasque", "-i", write(raw))
    D = cocharacters(N)
    assert rep["results"]["flasque"] == is_flasque(D)
    assert rep["results"]["subgroups_with_nonzero_h1"] == [
        list(H.elements) for H in subgroups(G) if not tate(D, 1, H).group.is_trivial]
