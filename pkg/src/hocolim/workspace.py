"""JSON workspace files: complexes, categories, diagrams and transformations.

Layout (all sections are objects keyed by name)::

    complexes:       {support: [lo, hi], gens: {deg: n}, diffs: {deg: M}, rels: {deg: M}}
    categories:      {builtin: "group_algebra:2"}  or
                     {objects, degrees?, homs: [{source, target, complex}],
                      compositions: [{objects: [a, b, c], matrices}], units: {obj: matrices}}
    diagrams:        {category, opposite?, values: {obj: complex}, actions: [{source, target, matrices}],
                      certificate?: {base, cells: [{object, source, target, map, attach}]},
                      bar?: {source, truncation}}
    transformations: {source, target, components: {obj: matrices}}

Matrices are lists of rows.  Complex references are names or inline complex
objects.  Objects are JSON strings or integers (lists for tuples) and are
written as keys through ``object_label``.  Canonical form: sorted keys, two-space
indentation, integers beyond 53 bits as decimal strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Hashable

from .chainz import ChainComplex, ChainMap, MalformedComplex, MalformedMap, tensor, unit_complex, zero_complex
from .dgcat import (
    DgCategory,
    MalformedCategory,
    arrow_category,
    dual_numbers_category,
    group_algebra_category,
    linearize,
    poset_category,
    simplex_category,
    torsion_endomorphism_category,
    unit_category,
)
from .diagram import Cell, CellPresentation, Diagram, Transformation, zero_diagram
from .zmat import IntMatrix

Obj = Hashable
SAFE_INT = 2 ** 53
SECTIONS = ("complexes", "categories", "diagrams", "transformations")


class WorkspaceError(ValueError):
    """Malformed workspace input; ``path`` locates the offending entry."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


# canonical JSON ---------------------------------------------------------------


def _encode(x: Any) -> Any:
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x) if abs(x) >= SAFE_INT else x
    if isinstance(x, dict):
        return {str(k): _encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_encode(v) for v in x]
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(doc: dict) -> str:
    return json.dumps(_encode(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise WorkspaceError(e.msg, f"line {e.lineno} column {e.colno}") from None
    if not isinstance(doc, dict):
        raise WorkspaceError("top level must be an object")
    for key in doc:
        if key not in SECTIONS:
            raise WorkspaceError(f"unknown section {key!r}", f"$.{key}")
    for key in SECTIONS:
        doc.setdefault(key, {})
        if not isinstance(doc[key], dict):
            raise WorkspaceError("section must be an object", f"$.{key}")
    return doc


def _int(x: Any, path: str) -> int:
    if isinstance(x, bool):
        raise WorkspaceError("expected an integer", path)
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return int(x, 10)
        except ValueError:
            pass
    raise WorkspaceError("expected an integer", path)


def _matrix(x: Any, nrows: int, ncols: int, path: str) -> IntMatrix:
    if not isinstance(x, list) or any(not isinstance(r, list) for r in x):
        raise WorkspaceError("expected a matrix (list of rows)", path)
    if len(x) != nrows or any(len(r) != ncols for r in x):
        shape = (len(x), len(x[0]) if x else 0)
        raise WorkspaceError(f"matrix has shape {shape}, expected {(nrows, ncols)}", path)
    return IntMatrix([[_int(v, f"{path}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(x)], ncols)


def _mat_json(m: IntMatrix) -> list:
    return [list(r) for r in m.rows]


def _degree_map(x: Any, path: str) -> dict[int, Any]:
    if not isinstance(x, dict):
        raise WorkspaceError("expected an object keyed by degree", path)
    return {_int(k, f"{path}.{k}"): v for k, v in x.items()}


# objects -------------------------------------------------------------------------


def object_label(o: Obj) -> str:
    """Strings label themselves; other objects by their JSON text."""
    if isinstance(o, str):
        return o
    return json.dumps(_object_json(o), separators=(",", ":"))


def _object_json(o: Obj) -> Any:
    if isinstance(o, tuple):
        return [_object_json(v) for v in o]
    return o


def _object_from_json(x: Any, path: str) -> Obj:
    if isinstance(x, list):
        return tuple(_object_from_json(v, path) for v in x)
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise WorkspaceError("objects are strings, integers or lists", path)
    return x


def _resolve_object(cat: DgCategory, label: Any, path: str) -> Obj:
    if not isinstance(label, str):
        label = object_label(_object_from_json(label, path))
    for o in cat.objects:
        if object_label(o) == label:
            return o
    raise WorkspaceError(f"unknown object {label!r}", path)


# complexes ------------------------------------------------------------------------


def complex_to_json(c: ChainComplex) -> dict:
    degs = c.degrees
    out: dict = {"support": [min(degs), max(degs)] if degs else [0, 0],
                 "gens": {str(n): c.ngens(n) for n in degs}}
    diffs = {str(n): _mat_json(c.d(n)) for n in degs if c.ngens(n - 1) and not c.d(n).is_zero()}
    rels = {str(n): _mat_json(c.rel(n)) for n in degs if c.has_relations(n)}
    if diffs:
        out["diffs"] = diffs
    if rels:
        out["rels"] = rels
    return out


def complex_from_json(x: Any, path: str) -> ChainComplex:
    if not isinstance(x, dict):
        raise WorkspaceError("expected a complex object", path)
    gens = {n: _int(g, f"{path}.gens.{n}") for n, g in _degree_map(x.get("gens", {}), f"{path}.gens").items()}
    if any(g < 0 for g in gens.values()):
        raise WorkspaceError("negative generator count", f"{path}.gens")
    sup = x.get("support")
    if sup is not None:
        if not isinstance(sup, list) or len(sup) != 2:
            raise WorkspaceError("support must be [lo, hi]", f"{path}.support")
        lo, hi = _int(sup[0], f"{path}.support[0]"), _int(sup[1], f"{path}.support[1]")
        outside = [n for n, g in gens.items() if g and not lo <= n <= hi]
        if outside:
            raise WorkspaceError(f"generators in degree {outside[0]} lie outside the support", f"{path}.gens")

    def ng(n):
        return gens.get(n, 0)

    diffs = {}
    for n, m in _degree_map(x.get("diffs", {}), f"{path}.diffs").items():
        diffs[n] = _matrix(m, ng(n - 1), ng(n), f"{path}.diffs.{n}")
    rels = {}
    for n, m in _degree_map(x.get("rels", {}), f"{path}.rels").items():
        if not isinstance(m, list):
            raise WorkspaceError("expected a matrix", f"{path}.rels.{n}")
        ncols = len(m[0]) if m and isinstance(m[0], list) else 0
        rels[n] = _matrix(m, ng(n), ncols, f"{path}.rels.{n}")
    try:
        return ChainComplex(gens, diffs, rels)
    except MalformedComplex as e:
        raise WorkspaceError(str(e), path) from None


def complex_support(x: dict) -> tuple[int, int] | None:
    sup = x.get("support")
    return (int(sup[0]), int(sup[1])) if isinstance(sup, list) and len(sup) == 2 else None


def _map_from_json(x: Any, source: ChainComplex, target: ChainComplex, path: str,
                   check: bool = True) -> ChainMap:
    comps = {}
    for n, m in _degree_map(x, path).items():
        comps[n] = _matrix(m, target.ngens(n), source.ngens(n), f"{path}.{n}")
    try:
        return ChainMap(source, target, comps, check=check)
    except MalformedMap as e:
        raise WorkspaceError(str(e), path) from None


def map_to_json(f: ChainMap) -> dict:
    return {str(n): _mat_json(f[n]) for n in f.degrees if f.source.ngens(n) and f.target.ngens(n)
            and not f[n].is_zero()}


# builtin categories ---------------------------------------------------------------


def builtin_category(spec: str) -> DgCategory:
    """"unit", "arrow", "group_algebra:N", "torsion_endomorphism:N", "simplex:N", "poset:N", "dual_numbers:N"."""
    name, _, arg = spec.partition(":")
    try:
        k = int(arg) if arg else None
    except ValueError:
        raise WorkspaceError(f"bad parameter in builtin {spec!r}") from None
    if name == "unit":
        return unit_category()
    if name == "arrow":
        return linearize(arrow_category(), {0: 0, 1: 1})
    if k is None or k < 0:
        raise WorkspaceError(f"builtin {spec!r} needs a non-negative parameter")
    if name == "group_algebra" and k >= 1:
        return group_algebra_category(k)
    if name == "torsion_endomorphism" and k >= 2:
        return torsion_endomorphism_category(k)
    if name == "simplex":
        return linearize(simplex_category(k), {n: n for n in range(k + 1)})
    if name == "poset":
        objs = list(range(k + 1))
        return linearize(poset_category(objs, lambda a, b: a <= b, f"[{k}]"), {n: n for n in objs})
    if name == "dual_numbers":
        return dual_numbers_category(k)
    raise WorkspaceError(f"unknown builtin category {spec!r}")


# the workspace ---------------------------------------------------------------------


@dataclass
class Workspace:
    """A parsed workspace document with lazily built objects."""

    doc: dict
    _complexes: dict = field(default_factory=dict)
    _categories: dict = field(default_factory=dict)
    _diagrams: dict = field(default_factory=dict)
    _transformations: dict = field(default_factory=dict)

    @classmethod
    def parse(cls, text: str) -> Workspace:
        return cls(loads(text))

    @classmethod
    def read(cls, path: str) -> Workspace:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise WorkspaceError(f"cannot read file: {e.strerror}", path) from None
        except UnicodeDecodeError:
            raise WorkspaceError("file is not UTF-8", path) from None
        return cls.parse(text)

    def dumps(self) -> str:
        return dumps(self.doc)

    def names(self, section: str) -> list[str]:
        return sorted(self.doc[section])

    def _entry(self, section: str, name: str) -> Any:
        if not isinstance(name, str) or name not in self.doc[section]:
            raise WorkspaceError(f"unknown {section[:-1]} {name!r}", f"$.{section}")
        return self.doc[section][name]

    # complexes

    def complex(self, ref: Any, path: str | None = None) -> ChainComplex:
        if isinstance(ref, dict):
            return complex_from_json(ref, path or "$")
        if ref not in self._complexes:
            entry = self._entry("complexes", ref)
            self._complexes[ref] = complex_from_json(entry, f"$.complexes.{ref}")
        return self._complexes[ref]

    def support(self, name: str) -> tuple[int, int] | None:
        return complex_support(self._entry("complexes", name))

    # categories

    def category(self, name: str) -> DgCategory:
        if name not in self._categories:
            path = f"$.categories.{name}"
            entry = self._entry("categories", name)
            if not isinstance(entry, dict):
                raise WorkspaceError("expected a category object", path)
            if "builtin" in entry:
                try:
                    self._categories[name] = builtin_category(entry["builtin"])
                except WorkspaceError as e:
                    raise WorkspaceError(e.message, f"{path}.builtin") from None
            else:
                self._categories[name] = self._custom_category(entry, path)
        return self._categories[name]

    def _custom_category(self, entry: dict, path: str) -> DgCategory:
        raw = entry.get("objects")
        if not isinstance(raw, list) or not raw:
            raise WorkspaceError("a category needs a non-empty object list", f"{path}.objects")
        objs = [_object_from_json(o, f"{path}.objects[{i}]") for i, o in enumerate(raw)]
        try:
            shell = DgCategory(objs)
        except MalformedCategory as e:
            raise WorkspaceError(str(e), f"{path}.objects") from None
        homs = {}
        for i, h in enumerate(entry.get("homs", [])):
            p = f"{path}.homs[{i}]"
            a = _resolve_object(shell, h.get("source"), f"{p}.source")
            b = _resolve_object(shell, h.get("target"), f"{p}.target")
            homs[(a, b)] = self.complex(h.get("complex"), f"{p}.complex")
        for a in objs:
            homs.setdefault((a, a), unit_complex())
        degree = None
        if "degrees" in entry:
            degs = entry["degrees"]
            if not isinstance(degs, dict):
                raise WorkspaceError("degrees must be an object", f"{path}.degrees")
            degree = {_resolve_object(shell, k, f"{path}.degrees.{k}"): _int(v, f"{path}.degrees.{k}")
                      for k, v in degs.items()}

        def hom(a, b):
            return homs.get((a, b), zero_complex())

        comps = {}
        for i, c in enumerate(entry.get("compositions", [])):
            p = f"{path}.compositions[{i}]"
            trip = c.get("objects")
            if not isinstance(trip, list) or len(trip) != 3:
                raise WorkspaceError("compositions name three objects", f"{p}.objects")
            a, b, d = (_resolve_object(shell, o, f"{p}.objects") for o in trip)
            comps[(a, b, d)] = _map_from_json(c.get("matrices", {}), tensor(hom(b, d), hom(a, b)), hom(a, d),
                                              f"{p}.matrices")
        units = {}
        given_units = entry.get("units", {})
        for a in objs:
            lab = object_label(a)
            if lab in given_units:
                units[a] = _map_from_json(given_units[lab], unit_complex(), hom(a, a), f"{path}.units.{lab}")
            elif hom(a, a).identical(unit_complex()):
                units[a] = ChainMap.identity(unit_complex())
        for a in objs:
            for b in objs:
                # identities compose trivially unless stated otherwise
                if (a, a, b) not in comps and a in units and units[a] == ChainMap.identity(unit_complex()):
                    comps[(a, a, b)] = ChainMap.identity(hom(a, b))
                if (a, b, b) not in comps and b in units and units[b] == ChainMap.identity(unit_complex()):
                    comps[(a, b, b)] = ChainMap.identity(hom(a, b))
        return DgCategory(objs, homs, comps, units, degree, name=entry.get("name", ""))

    def category_problems(self, name: str) -> list[tuple]:
        C = self.category(name)
        return C.check_associativity() + C.check_units()

    # diagrams

    def diagram_shape(self, name: str) -> DgCategory:
        entry = self._entry("diagrams", name)
        path = f"$.diagrams.{name}"
        if not isinstance(entry, dict) or not isinstance(entry.get("category"), str):
            raise WorkspaceError("a diagram names its category", f"{path}.category")
        try:
            C = self.category(entry["category"])
        except WorkspaceError as e:
            if e.path == "$.categories":
                raise WorkspaceError(e.message, f"{path}.category") from None
            raise
        return C.op if entry.get("opposite", False) else C

    def diagram(self, name: str) -> Diagram:
        if name not in self._diagrams:
            entry = self._entry("diagrams", name)
            path = f"$.diagrams.{name}"
            C = self.diagram_shape(name)
            values = {}
            for lab, ref in entry.get("values", {}).items():
                o = _resolve_object(C, lab, f"{path}.values.{lab}")
                values[o] = self.complex(ref, f"{path}.values.{lab}")
            actions = {}
            for i, a in enumerate(entry.get("actions", [])):
                p = f"{path}.actions[{i}]"
                s = _resolve_object(C, a.get("source"), f"{p}.source")
                t = _resolve_object(C, a.get("target"), f"{p}.target")
                src = tensor(C.hom(s, t), values.get(s, zero_complex()))
                actions[(s, t)] = _map_from_json(a.get("matrices", {}), src, values.get(t, zero_complex()),
                                                 f"{p}.matrices", check=False)
            self._diagrams[name] = Diagram(C, values, actions, name=name)
        return self._diagrams[name]

    def action_problems(self, name: str) -> list[tuple]:
        """Failures of the action laws, plus actions that are not chain maps."""
        x = self.diagram(name)
        bad = []
        for a, b in x.shape.pairs():
            try:
                x.act(a, b).validate()
            except MalformedMap as e:
                bad.append(("chain map", a, b, str(e)))
        return bad + x.check_action()

    def certificate(self, name: str) -> CellPresentation | None:
        """Replay the stored cells; the result is compared with the diagram by the caller."""
        entry = self._entry("diagrams", name)
        cert = entry.get("certificate")
        if cert is None:
            return None
        path = f"$.diagrams.{name}.certificate"
        C = self.diagram_shape(name)
        base_ref = cert.get("base")
        base = zero_diagram(C) if base_ref is None else self.diagram(base_ref)
        if base.shape.objects != C.objects:
            raise WorkspaceError("certificate base lives on another shape", f"{path}.base")
        pres = CellPresentation(base)
        for i, cell in enumerate(cert.get("cells", [])):
            p = f"{path}.cells[{i}]"
            o = _resolve_object(C, cell.get("object"), f"{p}.object")
            src = self.complex(cell.get("source"), f"{p}.source")
            tgt = self.complex(cell.get("target"), f"{p}.target")
            k = _map_from_json(cell.get("map", {}), src, tgt, f"{p}.map")
            cur = pres.result if pres.result is not None else base
            att = _map_from_json(cell.get("attach", {}), src, cur(o), f"{p}.attach")
            try:
                pres.extend(Cell(o, k, att))
            except ValueError as e:
                raise WorkspaceError(str(e), p) from None
        return pres

    # transformations

    def transformation(self, name: str) -> Transformation:
        if name not in self._transformations:
            entry = self._entry("transformations", name)
            path = f"$.transformations.{name}"
            x = self._diagram_ref(entry.get("source"), f"{path}.source")
            y = self._diagram_ref(entry.get("target"), f"{path}.target")
            if x.shape.objects != y.shape.objects:
                raise WorkspaceError("source and target live on different shapes", path)
            comps = {}
            for lab, m in entry.get("components", {}).items():
                o = _resolve_object(x.shape, lab, f"{path}.components.{lab}")
                comps[o] = _map_from_json(m, x(o), y(o), f"{path}.components.{lab}")
            self._transformations[name] = Transformation(x, y, comps)
        return self._transformations[name]

    def _diagram_ref(self, ref: Any, path: str) -> Diagram:
        if not isinstance(ref, str) or ref not in self.doc["diagrams"]:
            raise WorkspaceError(f"unknown diagram {ref!r}", path)
        return self.diagram(ref)

    # writing

    def add_complex(self, name: str, c: ChainComplex) -> str:
        self.doc["complexes"][name] = complex_to_json(c)
        self._complexes.pop(name, None)
        return name

    def add_diagram(self, name: str, x: Diagram, category: str, opposite: bool = False,
                    extra: dict | None = None) -> str:
        """Store x with values as named complexes ``name/label``."""
        C = x.shape
        values = {}
        for o in C.objects:
            if not x(o).is_zero_complex():
                values[object_label(o)] = self.add_complex(f"{name}/{object_label(o)}", x(o))
        actions = []
        for a, b in C.pairs():
            m = x.act(a, b)
            mats = map_to_json(m)
            if mats:
                actions.append({"source": _object_json(a), "target": _object_json(b), "matrices": mats})
        entry = {"category": category, "values": values, "actions": actions}
        if opposite:
            entry["opposite"] = True
        entry.update(extra or {})
        self.doc["diagrams"][name] = entry
        self._diagrams.pop(name, None)
        return name

    def add_transformation(self, name: str, f: Transformation, source: str, target: str) -> str:
        comps = {}
        for o in f.source.shape.objects:
            mats = map_to_json(f[o])
            if mats:
                comps[object_label(o)] = mats
        self.doc["transformations"][name] = {"source": source, "target": target, "components": comps}
        self._transformations.pop(name, None)
        return name

    def certificate_json(self, pres: CellPresentation, base: str | None, prefix: str) -> dict:
        cells = []
        for i, cell in enumerate(pres.cells):
            src = self.add_complex(f"{prefix}/cell{i}/source", cell.k.source)
            tgt = self.add_complex(f"{prefix}/cell{i}/target", cell.k.target)
            cells.append({"object": _object_json(cell.obj), "source": src, "target": tgt,
                          "map": map_to_json(cell.k), "attach": map_to_json(cell.attach)})
        return {"base": base, "cells": cells}

