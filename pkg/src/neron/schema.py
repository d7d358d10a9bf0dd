"""JSON input documents: parsing, validation and normalization."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .gmod import (DEFAULT_MAX_ORDER, GModule, GroupError, close_group,
                   parse_word, subgroup)
from .intlat import block_diag, determinant, identity, intmat

SCHEMA = "neron/1"
SAFE_INT = 2 ** 53


class SchemaError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class ValidationError(ValueError):
    def __init__(self, path: str, message: str, kind: str = "ValidationError"):
        super().__init__(f"{path}: {kind}: {message}")
        self.path = path
        self.kind = kind


# ---------------------------------------------------------------------------
# JSON integers


def encode_int(x: int):
    x = int(x)
    return str(x) if abs(x) >= SAFE_INT else x


def encode_matrix(m) -> list:
    return [[encode_int(x) for x in row] for row in m]


def group_json(g) -> dict:
    return {"rank": g.rank, "invariant_factors": [encode_int(d) for d in g.invariant_factors]}


def _int(x, path: str) -> int:
    if isinstance(x, bool):
        raise SchemaError(path, "expected an integer")
    if isinstance(x, int):
        return x
    if isinstance(x, float) and x.is_integer() and abs(x) < SAFE_INT:
        return int(x)
    if isinstance(x, str):
        try:
            return int(x.strip(), 10)
        except ValueError:
            pass
    raise SchemaError(path, f"expected an integer, got {x!r}")


def _matrix(x, path: str, rows: int | None = None, cols: int | None = None) -> list[list[int]]:
    if not isinstance(x, list) or not all(isinstance(r, list) for r in x):
        raise SchemaError(path, "expected a matrix (list of rows)")
    m = [[_int(v, f"{path}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(x)]
    if rows is not None and len(m) != rows:
        raise SchemaError(path, f"expected {rows} rows, got {len(m)}")
    width = cols if cols is not None else (len(m[0]) if m else 0)
    for i, r in enumerate(m):
        if len(r) != width:
            raise SchemaError(f"{path}[{i}]", f"expected {width} entries, got {len(r)}")
    return m


def _words(x, path: str) -> list[str]:
    if not isinstance(x, list):
        raise SchemaError(path, "expected a list of words")
    out = []
    for i, w in enumerate(x):
        if not isinstance(w, str):
            raise SchemaError(f"{path}[{i}]", "expected a word such as \"s*t^-1\"")
        out.append(w.replace(" ", ""))
    return out


def _require(d: dict, key: str, path: str):
    if key not in d:
        raise SchemaError(f"{path}.{key}", "missing field")
    return d[key]


# ---------------------------------------------------------------------------


@dataclass
class InputDocument:
    """A validated, normalized input document (``data``) with builders."""

    data: dict
    max_order: int = field(default=DEFAULT_MAX_ORDER, compare=False)

    @property
    def name(self) -> str:
        return self.data["name"]

    @property
    def kind(self) -> str:
        if "root_datum" in self.data:
            return "root_datum"
        if "ses" in self.data:
            return "ses"
        return "torus"

    @property
    def options(self) -> dict:
        return self.data.get("options", {})

    def dumps(self) -> str:
        return json.dumps(self.data, sort_keys=True)

    # -- builders -----------------------------------------------------------

    def _galois(self):
        d = self.data
        gens = d["galois"]["generators"]
        blocks = [[g["matrix"]] for g in gens]
        sizes = [d["rank"]]
        if "ses" in d:
            for key in ("t1", "t3"):
                sizes.append(d["ses"][key]["rank"])
                for k, img in enumerate(d["ses"][key]["images"]):
                    blocks[k].append(img)
        perm_size = next((len(g["perm"]) for g in gens if "perm" in g), 0)
        names = [g["name"] for g in gens]
        if not gens:
            G = close_group([], names=[])
            return G, [[identity(n)] for n in sizes]
        full = []
        for k, g in enumerate(gens):
            parts = []
            if perm_size:
                parts.append(intmat(g["perm"]) if "perm" in g else identity(perm_size))
            parts += [intmat(b, rows=n, cols=n) for b, n in zip(blocks[k], sizes)]
            full.append(block_diag(parts))
        try:
            G = close_group(full, self.max_order, names)
        except GroupError as e:
            raise ValidationError("$.galois.generators", str(e), type(e).__name__) from e
        actions = []
        off = perm_size
        for n in sizes:
            actions.append([m[off:off + n, off:off + n].copy() for m in G.matrices])
            off += n
        return G, actions

    def build(self):
        """Construct the group, main module, inertia and Frobenius."""
        if getattr(self, "_built", None) is None:
            G, actions = self._galois()
            d = self.data
            try:
                J = subgroup(G, [parse_word(G, w) for w in d["inertia"]]) if d["inertia"] \
                    else subgroup(G, [0])
            except GroupError as e:
                raise ValidationError("$.inertia", str(e), type(e).__name__) from e
            frob = None
            if d.get("frobenius") is not None:
                try:
                    frob = parse_word(G, d["frobenius"])
                except GroupError as e:
                    raise ValidationError("$.frobenius", str(e), type(e).__name__) from e
            mods = []
            for k, acts in enumerate(actions):
                M = GModule(G, acts, check=False)
                try:
                    M.check()
                except ValueError as e:
                    raise ValidationError("$.galois.generators", str(e), "InvalidAction") from e
                mods.append(M)
            self._built = (G, mods, J, frob)
        return self._built

    def torus(self):
        G, mods, J, frob = self.build()
        return self._make_torus(mods[0], J, frob, self.name)

    def _make_torus(self, M, J, frob, name):
        from .torus import TorusModel
        if not J.is_normal:
            raise ValidationError("$.inertia", "inertia subgroup is not normal",
                                  "NonNormalSubgroupForResidualAction")
        try:
            return TorusModel(M, J, frob, name)
        except GroupError as e:
            raise ValidationError("$.frobenius", str(e), "FrobeniusNotGenerating") from e

    def ses(self):
        """(T1, T2, T3, a, b) with characters 0 -> X*(T3) -a-> X*(T2) -b-> X*(T1) -> 0."""
        if "ses" not in self.data:
            raise SchemaError("$.ses", "document has no short exact sequence")
        G, mods, J, frob = self.build()
        s = self.data["ses"]
        T2 = self._make_torus(mods[0], J, frob, self.name)
        T1 = self._make_torus(mods[1], J, frob, "T1")
        T3 = self._make_torus(mods[2], J, frob, "T3")
        return T1, T2, T3, intmat(s["a"], rows=T2.rank, cols=T3.rank), \
            intmat(s["b"], rows=T1.rank, cols=T2.rank)

    def validate(self):
        """Build the object the document describes; errors carry JSON paths."""
        if self.kind == "torus":
            self.torus()
        elif self.kind == "root_datum":
            self.root_datum()
        else:
            from .gcoh import NotExactInput, ShortExactSequence
            from .gmod import ModuleMap, NonEquivariantMap
            T1, T2, T3, a, b = self.ses()
            try:
                ShortExactSequence(ModuleMap(T3.char_module, T2.char_module, a),
                                   ModuleMap(T2.char_module, T1.char_module, b))
            except (NotExactInput, NonEquivariantMap) as e:
                raise ValidationError("$.ses", str(e), type(e).__name__) from e

    def root_datum(self):
        from .reductive import CorootsNotStable, RootDatumModel
        if "root_datum" not in self.data:
            raise SchemaError("$.root_datum", "document has no root datum")
        G, mods, J, frob = self.build()
        rd = self.data["root_datum"]
        p = None
        if "pi1" in rd:
            rel = intmat(rd["pi1"]["relations"])
            imgs = rd["pi1"]["images"]
            if len(imgs) != len(G.generators):
                raise ValidationError("$.root_datum.pi1.images", "one image per generator required")
            try:
                p = GModule.from_generator_images(G, [intmat(m) for m in imgs], rel) if imgs \
                    else GModule(G, [identity(rel.shape[0])] * G.order, rel)
            except ValueError as e:
                raise ValidationError("$.root_datum.pi1", str(e), "InvalidAction") from e
        try:
            datum = RootDatumModel(mods[0], rd["coroots"], p, self.name)
        except CorootsNotStable as e:
            raise ValidationError("$.root_datum.coroots", str(e), "CorootsNotStable") from e
        if not J.is_normal:
            raise ValidationError("$.inertia", "inertia subgroup is not normal",
                                  "NonNormalSubgroupForResidualAction")
        return datum, J, frob


def normalize(raw) -> dict:
    """Validate the shape of a raw JSON object and return its normal form."""
    if not isinstance(raw, dict):
        raise SchemaError("$", "expected a JSON object")
    schema = raw.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise SchemaError("$.schema", f"unsupported schema {schema!r}")
    n = _int(_require(raw, "rank", "$"), "$.rank")
    if n < 0:
        raise SchemaError("$.rank", "rank must be non-negative")
    galois = _require(raw, "galois", "$")
    if not isinstance(galois, dict):
        raise SchemaError("$.galois", "expected an object")
    gens_raw = _require(galois, "generators", "$.galois")
    if not isinstance(gens_raw, list):
        raise SchemaError("$.galois.generators", "expected a list")
    gens = []
    perm_size = None
    for k, g in enumerate(gens_raw):
        path = f"$.galois.generators[{k}]"
        if not isinstance(g, dict):
            raise SchemaError(path, "expected an object with name and matrix")
        name = g.get("name", f"g{k}")
        if not isinstance(name, str) or not name.isidentifier():
            raise SchemaError(f"{path}.name", "generator names must be identifiers")
        m = _matrix(_require(g, "matrix", path), f"{path}.matrix", n, n)
        if n and abs(determinant(intmat(m))) != 1:
            raise ValidationError(f"{path}.matrix", f"determinant {determinant(intmat(m))}",
                                  "NonUnimodularGenerator")
        entry = {"name": name, "matrix": m}
        if "perm" in g:
            p = _matrix(g["perm"], f"{path}.perm")
            if perm_size is None:
                perm_size = len(p)
            if len(p) != perm_size or any(len(r) != perm_size for r in p) or not _is_perm(p):
                raise ValidationError(f"{path}.perm", "not a permutation matrix of the common size")
            entry["perm"] = p
        gens.append(entry)
    if len({g["name"] for g in gens}) != len(gens):
        raise SchemaError("$.galois.generators", "generator names must be unique")
    out = {
        "schema": SCHEMA,
        "name": str(raw.get("name", "unnamed")),
        "rank": n,
        "galois": {"generators": gens},
        "inertia": _words(raw.get("inertia", []), "$.inertia"),
        "frobenius": raw.get("frobenius"),
    }
    if out["frobenius"] is not None and not isinstance(out["frobenius"], str):
        raise SchemaError("$.frobenius", "expected a word")
    if out["frobenius"] is not None:
        out["frobenius"] = out["frobenius"].replace(" ", "")
    if "ses" in raw and raw["ses"] is not None:
        out["ses"] = _normalize_ses(raw["ses"], n, len(gens))
    if "root_datum" in raw and raw["root_datum"] is not None:
        out["root_datum"] = _normalize_root_datum(raw["root_datum"], n, len(gens))
    if "options" in raw:
        opts = raw["options"]
        if not isinstance(opts, dict):
            raise SchemaError("$.options", "expected an object")
        out["options"] = {}
        for key, v in opts.items():
            if key == "degree":
                out["options"]["degree"] = _int(v, "$.options.degree")
            elif key == "mode":
                if not isinstance(v, str):
                    raise SchemaError("$.options.mode", "expected a string")
                out["options"]["mode"] = v
            else:
                raise SchemaError(f"$.options.{key}", "unknown option")
    unknown = set(raw) - {"schema", "name", "rank", "galois", "inertia", "frobenius", "ses",
                          "root_datum", "options"}
    if unknown:
        raise SchemaError(f"$.{sorted(unknown)[0]}", "unknown field")
    return out


def _is_perm(p) -> bool:
    n = len(p)
    return all(sorted(r) == [0] * (n - 1) + [1] for r in p) and \
        all(sum(p[i][j] for i in range(n)) == 1 for j in range(n))


def _normalize_ses(s, n, ngens) -> dict:
    if not isinstance(s, dict):
        raise SchemaError("$.ses", "expected an object")
    out = {}
    for key in ("t1", "t3"):
        path = f"$.ses.{key}"
        t = _require(s, key, "$.ses")
        if not isinstance(t, dict):
            raise SchemaError(path, "expected an object with rank and images")
        r = _int(_require(t, "rank", path), f"{path}.rank")
        imgs = _require(t, "images", path)
        if not isinstance(imgs, list) or len(imgs) != ngens:
            raise SchemaError(f"{path}.images", f"expected {ngens} matrices (one per generator)")
        out[key] = {"rank": r, "images": [_matrix(m, f"{path}.images[{i}]", r, r)
                                          for i, m in enumerate(imgs)]}
    out["a"] = _matrix(_require(s, "a", "$.ses"), "$.ses.a", n, out["t3"]["rank"])
    out["b"] = _matrix(_require(s, "b", "$.ses"), "$.ses.b", out["t1"]["rank"], n)
    return out


def _normalize_root_datum(rd, n, ngens) -> dict:
    if not isinstance(rd, dict):
        raise SchemaError("$.root_datum", "expected an object")
    cor = rd.get("coroots", [])
    if not isinstance(cor, list):
        raise SchemaError("$.root_datum.coroots", "expected a list of vectors")
    out = {"coroots": [[_int(x, f"$.root_datum.coroots[{i}][{j}]") for j, x in enumerate(c)]
                       for i, c in enumerate(cor)]}
    for i, c in enumerate(out["coroots"]):
        if len(c) != n:
            raise SchemaError(f"$.root_datum.coroots[{i}]", f"expected {n} entries")
    if "pi1" in rd:
        p = rd["pi1"]
        rel = _matrix(_require(p, "relations", "$.root_datum.pi1"), "$.root_datum.pi1.relations")
        k = len(rel)
        imgs = p.get("images", [])
        out["pi1"] = {"relations": rel,
                      "images": [_matrix(m, f"$.root_datum.pi1.images[{i}]", k, k)
                                 for i, m in enumerate(imgs)]}
    return out


def parse_document(raw, max_order: int = DEFAULT_MAX_ORDER) -> InputDocument:
    doc = InputDocument(normalize(raw), max_order)
    doc.validate()
    return doc


def parse_input(source, max_order: int = DEFAULT_MAX_ORDER) -> InputDocument:
    """Parse a path, a file object, or JSON text."""
    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, str) and source.lstrip().startswith("{"):
        text = source
    else:
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise SchemaError("$", f"cannot read input: {e}") from e
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("$", f"invalid JSON: {e}") from e
    return parse_document(raw, max_order)


def dump_document(doc: InputDocument) -> dict:
    """JSON-ready normal form (big integers as strings)."""
    return _encode(doc.data)


def _encode(x):
    if isinstance(x, dict):
        return {k: _encode(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_encode(v) for v in x]
    if isinstance(x, int) and not isinstance(x, bool):
        return encode_int(x)
    return x
