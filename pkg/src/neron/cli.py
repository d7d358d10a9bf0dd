"""Command-line interface: ``neron <command> [--input FILE] ...``.

Exit codes: 0 ok, 1 input error, 2 computation error, 3 verification failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from .gcoh import DegreeCapExceeded, NotExactInput, tate
from .gmod import GroupError, subgroups
from .intlat import FgAbGroup
from .localfield import (DivisibleGroup, InvalidDegree, MissingFrobenius, NotUnipotent,
                         ResidueFieldMode, SymbolicModule, local_cohomology,
                         unipotent_cross_check)
from .reductive import abelian_cohomology, h1_reductive, is_flasque, pi1
from .schema import (SCHEMA, InputDocument, SchemaError, ValidationError, dump_document,
                     encode_matrix, group_json, parse_input)
from .torus import (MismatchedGaloisData, ReductionType, canonical_resolution, cocharacters,
                    component_group, component_sequence, reduction_pieces, reduction_type,
                    six_term)
from .verify import Config, run_verify

EXIT_OK, EXIT_INPUT, EXIT_COMPUTE, EXIT_VERIFY = 0, 1, 2, 3

COMMANDS = ("component-group", "reduction-type", "resolve", "six-term", "local-cohomology",
            "reductive-h1", "abelian-cohomology", "is-flasque", "verify", "corpus")
NEEDS_INPUT = set(COMMANDS) - {"verify", "corpus"}


class InputError(ValueError):
    pass


def load_config(path: str | None, seed: int | None = None) -> Config:
    cfg = Config()
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise InputError(f"config: {e}") from e
        if not isinstance(raw, dict):
            raise InputError("config: expected a JSON object")
        known = {"max_order", "degree_window", "corpus_size", "seed", "random_max_order",
                 "random_max_rank"}
        for key, v in raw.items():
            if key not in known:
                raise InputError(f"config: unknown key {key!r}")
            if key == "degree_window":
                if not (isinstance(v, list) and len(v) == 2 and all(isinstance(x, int) for x in v)
                        and v[0] <= 0 <= v[1]):
                    raise InputError("config: degree_window must be [lo, hi] with lo <= 0 <= hi")
                cfg.degree_window = (v[0], v[1])
            else:
                if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                    raise InputError(f"config: {key} must be a non-negative integer")
                setattr(cfg, key, v)
    if seed is not None:
        cfg.seed = seed
    return cfg


def _result(x) -> dict:
    if isinstance(x, FgAbGroup):
        return group_json(x)
    if isinstance(x, DivisibleGroup):
        return {"divisible_rank": x.rank}
    if isinstance(x, SymbolicModule):
        return {"symbolic": {"degree": x.degree, "module": x.label,
                             "structure": group_json(x.module.structure())}}
    raise TypeError(type(x))


def _check(name: str, passed: bool, detail: str = "") -> dict:
    return {"name": name, "passed": bool(passed), "detail": detail}


def _mode(args, doc) -> ResidueFieldMode:
    text = args.mode or doc.options.get("mode") or "quasi-finite"
    try:
        return ResidueFieldMode.parse(text)
    except ValueError as e:
        raise InputError(str(e)) from e


def _degrees(args, doc, default):
    d = args.degree if args.degree is not None else doc.options.get("degree")
    return [d] if d is not None else list(default)


# ---------------------------------------------------------------------------
# commands


def _torus_checks(T):
    cg = component_group(T)
    cs = component_sequence(T)
    checks = [_check(f"component_group.{k}", v) for k, v in cg.checks.items()]
    checks.append(_check("component_sequence.exact", cs.exact,
                         f"|ker q| = |H1(J, X*)| = {cs.tors.order}"))
    return cg, cs, checks


def cmd_component_group(doc, args, cfg):
    T = doc.torus()
    cg, cs, checks = _torus_checks(T)
    results = {"phi": group_json(cg.structure), "torsion": group_json(cg.torsion_part),
               "free_rank": cg.free_rank, "h1_inertia": group_json(cs.tors),
               "q_matrix": encode_matrix(cs.q.matrix.tolist()),
               "reduction_type": reduction_type(T).value}
    return results, checks


def cmd_reduction_type(doc, args, cfg):
    T = doc.torus()
    rt = reduction_type(T)
    pieces = reduction_pieces(T)
    cg = component_group(T)
    inv_zero = pieces.m_upper.rank == 0
    checks = [_check(f"reduction_pieces.{k}", v) for k, v in pieces.checks.items()]
    checks.append(_check("unipotent_iff_finite_phi",
                         (rt == ReductionType.UNIPOTENT) == cg.structure.is_finite == inv_zero))
    results = {"reduction_type": rt.value,
               "pieces": {k: {"rank": m.rank} for k, m in pieces.as_dict().items()}}
    return results, checks


def cmd_resolve(doc, args, cfg):
    T = doc.torus()
    res = canonical_resolution(T)
    results = {
        "P": {"rank": res.P.rank, "phi": group_json(component_group(res.P).structure)},
        "Q": {"rank": res.Q.rank, "phi": group_json(component_group(res.Q).structure)},
        "T": {"rank": res.T.rank, "phi": group_json(component_group(res.T).structure)},
        "galois_image_order": res.T.galois.order,
        "char_T_to_Q": encode_matrix(res.t_to_q.matrix.tolist()),
        "char_Q_to_P": encode_matrix(res.q_to_p.matrix.tolist()),
        "phi_P_to_Q": encode_matrix(res.phi_p_to_q.matrix.tolist()),
        "phi_Q_to_T": encode_matrix(res.phi_q_to_t.matrix.tolist()),
    }
    return results, [_check(k, v) for k, v in res.report.items()]


def cmd_six_term(doc, args, cfg):
    T1, T2, T3, a, b = doc.ses()
    rep = six_term(T1, T2, T3, a, b)
    results = {"h2": [group_json(g) for g in rep.h2], "phi": [group_json(g) for g in rep.phi],
               "kernel_order": rep.kernel_order, "h2_kernel_order": rep.h2_kernel_order}
    return results, [_check(k, v) for k, v in rep.checks.items()]


def cmd_local_cohomology(doc, args, cfg):
    T = doc.torus()
    mode = _mode(args, doc)
    default = [mode.n + 1, mode.n + 2] if mode.kind == "cd_n" and mode.n >= 2 else [1, 2, 3]
    out = {}
    for r in _degrees(args, doc, default):
        out[str(r)] = _result(local_cohomology(T, mode, r).result)
    checks = []
    if mode.cd_le_1:
        checks.append(_check("vanishing_r3_r4", all(
            local_cohomology(T, mode, r).result.is_trivial for r in (3, 4))))
    if reduction_type(T) == ReductionType.UNIPOTENT and mode.kind != "cd_n":
        checks.append(_check("unipotent_routes_agree", unipotent_cross_check(T, mode)))
    _, _, tchecks = _torus_checks(T)
    return {"mode": str(mode), "degrees": out}, checks + tchecks


def _root_datum(doc):
    return doc.root_datum()


def cmd_reductive_h1(doc, args, cfg):
    rd, J, frob = _root_datum(doc)
    mode = _mode(args, doc)
    h1 = h1_reductive(rd, J, mode, frob)  # raises if the two routes disagree
    p = pi1(rd)
    results = {"pi1": group_json(p.structure()), "h1": group_json(h1)}
    return results, [_check("two_step_equals_one_step", True,
                            "torsion of full coinvariants = H1 of Frobenius on inertia coinvariants")]


def cmd_abelian_cohomology(doc, args, cfg):
    rd, J, frob = _root_datum(doc)
    mode = _mode(args, doc)
    default = [mode.n + 1, mode.n + 2] if mode.kind == "cd_n" and mode.n >= 2 else [1, 2, 3]
    out = {}
    last = None
    for r in _degrees(args, doc, default):
        last = abelian_cohomology(rd, J, mode, r, frob)
        out[str(r)] = _result(last.result)
    p = pi1(rd)
    results = {"mode": str(mode), "pi1": group_json(p.structure()),
               "pi1_inertia_coinvariants": group_json(last.pi1_coinv.structure()),
               "degrees": out}
    checks = []
    if mode.cd_le_1:
        checks.append(_check("vanishing_r3", abelian_cohomology(rd, J, mode, 3, frob)
                             .result.is_trivial))
    return results, checks


def cmd_is_flasque(doc, args, cfg):
    if doc.kind == "root_datum":
        M = doc.root_datum()[0].cochar_lattice
    else:
        M = cocharacters(doc.torus())
    failing = [list(H.elements) for H in subgroups(M.group)
               if not tate(M, 1, H).group.is_trivial]
    flasque = is_flasque(M)
    results = {"flasque": flasque, "subgroups_with_nonzero_h1": failing}
    return results, [_check("agrees_with_subgroup_scan", flasque == (not failing))]


def cmd_verify(doc, args, cfg):
    suites = run_verify(cfg)
    checks = [s.as_check() for s in suites]
    results = {"seed": cfg.seed, "corpus_size": cfg.corpus_size,
               "suites": len(suites), "failed": sum(not s.passed for s in suites)}
    return results, checks


def cmd_corpus(doc, args, cfg):
    from .corpus import builtin_corpus
    docs = builtin_corpus(cfg.max_order)
    return {"documents": [dump_document(d) for d in docs]}, [
        _check("names_unique", len({d.name for d in docs}) == len(docs)),
        _check("at_least_12_entries", len(docs) >= 12, f"{len(docs)} entries")]


HANDLERS = {
    "component-group": cmd_component_group,
    "reduction-type": cmd_reduction_type,
    "resolve": cmd_resolve,
    "six-term": cmd_six_term,
    "local-cohomology": cmd_local_cohomology,
    "reductive-h1": cmd_reductive_h1,
    "abelian-cohomology": cmd_abelian_cohomology,
    "is-flasque": cmd_is_flasque,
    "verify": cmd_verify,
    "corpus": cmd_corpus,
}


INPUT_ERRORS = (SchemaError, ValidationError, InputError, GroupError, MissingFrobenius,
                InvalidDegree, DegreeCapExceeded, NotExactInput, MismatchedGaloisData,
                NotUnipotent)


def run(command: str, doc: InputDocument | None, config: Config, args=None) -> tuple[dict, int]:
    """Execute a command; returns the report and the exit code."""
    if args is None:
        args = argparse.Namespace(degree=None, mode=None)
    report = {"schema": SCHEMA, "command": command,
              "input": dump_document(doc) if doc is not None else None,
              "results": None, "checks": [], "timing": None}
    try:
        results, checks = HANDLERS[command](doc, args, config)
    except INPUT_ERRORS as e:
        report["error"] = {"kind": getattr(e, "kind", type(e).__name__), "message": str(e)}
        return report, EXIT_INPUT
    except (ArithmeticError, ValueError) as e:
        report["error"] = {"kind": type(e).__name__, "message": str(e)}
        return report, EXIT_COMPUTE
    report["results"] = results
    report["checks"] = checks
    failed = any(not c["passed"] for c in checks)
    if failed:
        return report, EXIT_VERIFY if command == "verify" else EXIT_COMPUTE
    return report, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="neron",
        description="Component groups and local Galois cohomology of tori from lattices "
                    "with finite group action.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", "-i", help="input document (JSON); '-' reads stdin")
    p.add_argument("--seed", type=int, help="random seed for verify (overrides config)")
    p.add_argument("--config", help="JSON config: max_order, degree_window, corpus_size, seed")
    p.add_argument("--degree", "-r", type=int, help="cohomological degree")
    p.add_argument("--mode", help="residue field: quasi-finite (default), generic, cd<n>")
    p.add_argument("--timing", action="store_true", help="record wall-clock time in the report")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json",
                     help="compact JSON (default)")
    fmt.add_argument("--pretty", dest="fmt", action="store_const", const="pretty",
                     help="indented JSON")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        cfg = load_config(args.config, args.seed)
        doc = None
        if args.command in NEEDS_INPUT:
            if not args.input:
                raise InputError(f"{args.command} needs --input")
            src = sys.stdin if args.input == "-" else args.input
            doc = parse_input(src, cfg.max_order)
    except (SchemaError, ValidationError, InputError) as e:
        report = {"schema": SCHEMA, "command": args.command, "input": None, "results": None,
                  "checks": [], "timing": None,
                  "error": {"kind": getattr(e, "kind", type(e).__name__), "message": str(e)}}
        _emit(report, args.fmt)
        return EXIT_INPUT
    report, code = run(args.command, doc, cfg, args)
    if args.timing:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 3)}
    _emit(report, args.fmt)
    return code


def _emit(report, fmt):
    if fmt == "pretty":
        text = json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False)
    else:
        text = json.dumps(report, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    sys.stdout.write(text + "\n")


if __name__ == "__main__":
    sys.exit(main())
