"""Command line: hocolim homology|replace|wcolim|verify <workspace.json> [flags].

Exit status 0 when every check passes, 1 on a check failure, 2 on input errors.
Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .bar import BarError, bar_replacement, we_through
from .chainz import ChainComplex, MalformedComplex, MalformedMap, is_cofibration, is_flat, is_weak_equivalence
from .dgcat import MalformedCategory, is_locally_flat
from .diagram import (
    MalformedDiagram,
    is_pointwise_we,
    same_diagram,
    weighted_colimit,
    weighted_colimit_map,
)
from .reedy import ReedyError, direct_reedy, latching, replace_direct
from .report import Report, homology_json, homology_text
from .suites import run_suite
from .workspace import Workspace, WorkspaceError, object_label

log = logging.getLogger("hocolim")

DEFAULT_MAX_DEGREE = 8
DEFAULT_BAR_TRUNCATION = 6


class InputError(Exception):
    pass


def max_degree() -> int:
    raw = os.environ.get("HOCOLIM_MAX_DEGREE")
    if raw is None or raw == "":
        return DEFAULT_MAX_DEGREE
    try:
        v = int(raw)
    except ValueError:
        raise InputError(f"HOCOLIM_MAX_DEGREE must be an integer, got {raw!r}") from None
    if v < 0:
        raise InputError("HOCOLIM_MAX_DEGREE must be non-negative")
    return v


def clamp_truncation(requested: int | None, default: int) -> tuple[int, dict]:
    cap = max_degree()
    want = default if requested is None else requested
    if want < 0:
        raise InputError("--truncation must be non-negative")
    used = min(want, cap)
    if used < want:
        log.warning("truncation %d capped to %d by HOCOLIM_MAX_DEGREE", want, used)
    return used, {"requested": want, "used": used, "cap": cap}


def _degrees(c: ChainComplex, support: tuple[int, int] | None) -> list[int]:
    degs = set(c.degrees)
    if support is not None:
        degs |= set(range(support[0], support[1] + 1))
    if not degs:
        degs = {0}
    lo, hi = min(degs), max(degs)
    return list(range(lo, hi + 1))


# homology -------------------------------------------------------------------------


def cmd_homology(ws: Workspace, name: str) -> Report:
    c = ws.complex(name)
    degs = _degrees(c, ws.support(name))
    h = c.homology
    r = Report("homology", data={"name": name, "homology": homology_json(h, degs)})
    r.summary.append(f"{name}: {homology_text(h, degs)}")
    return r


# replace --------------------------------------------------------------------------


def _pointwise_checks(r: Report, prefix: str, maps: dict, test) -> None:
    for o, m in maps.items():
        ok = test(m)
        r.add(f"{prefix}/{object_label(o)}", ok, None if ok else {
            "object": object_label(o),
            "source_homology": str(m.source.homology), "target_homology": str(m.target.homology)})


def cmd_replace(ws: Workspace, name: str, mode: str, truncation: int | None,
                away_from: list[str]) -> tuple[Report, Workspace]:
    x = ws.diagram(name)
    entry = ws.doc["diagrams"][name]
    cat = entry["category"]
    if entry.get("opposite"):
        raise InputError(f"diagram {name!r} is a weight (opposite shape); replace a covariant diagram")
    r = Report("replace", data={"diagram": name, "mode": mode})
    _validate_diagram(ws, name, r)
    if not r.passed:
        return r, ws
    if mode == "direct":
        labels = {object_label(o): o for o in x.shape.objects}
        missing = [a for a in away_from if a not in labels]
        if missing:
            raise InputError(f"unknown object {missing[0]!r} in --away-from")
        inside = [labels[a] for a in away_from]
        try:
            rep = replace_direct(x, inside)
        except ReedyError as e:
            raise InputError(f"direct replacement precondition: {e}") from None
        out = f"{name}.replacement"
        base = None
        if inside:
            base = ws.add_diagram(f"{name}.base", rep.presentation.base, cat)
        cert = ws.certificate_json(rep.presentation, base, out)
        ws.add_diagram(out, rep.diagram, cat, extra={"certificate": cert})
        ws.add_transformation(f"{name}.augmentation", rep.augmentation, out, name)
        _pointwise_checks(r, "pointwise_we", rep.augmentation.comps, is_weak_equivalence)
        checks = rep.check()
        r.add("cell_presentation_replays", checks["replay"])
        r.add("cells_are_cofibrations", checks["cells_cofibrations"])
        r.add("agrees_on_subcategory", checks["agrees_on_subcategory"],
              None if checks["agrees_on_subcategory"] else {"objects": away_from})
        R = direct_reedy(rep.diagram.shape)
        for o in x.shape.objects:
            if o in inside:
                continue
            ok = is_cofibration(latching(R, rep.diagram, o).map)
            r.add(f"latching_cofibration/{object_label(o)}", ok, None if ok else {"object": object_label(o)})
        r.data.update({"output": out, "attached": [object_label(o) for o in rep.attached],
                       "away_from": away_from,
                       "pointwise_homology": {object_label(o): str(rep.diagram(o).homology)
                                              for o in x.shape.objects}})
        r.summary.append(f"attached cells at: {', '.join(object_label(o) for o in rep.attached) or 'none'}")
        for o in x.shape.objects:
            r.summary.append(f"{object_label(o)}: {rep.diagram(o).homology}")
        return r, ws
    if away_from:
        raise InputError("--away-from applies to --mode direct only")
    N, trunc = clamp_truncation(truncation, DEFAULT_BAR_TRUNCATION)
    lf = is_locally_flat(x.shape)
    if not lf:
        raise InputError(f"bar replacement needs a locally flat shape; fails at {sorted(lf.failures, key=str)[0]}")
    try:
        br = bar_replacement(x, N)
    except BarError as e:
        raise InputError(str(e)) from None
    top = br.safe_degree
    out = f"{name}.bar"
    target = name
    if br.shift:
        target = ws.add_diagram(f"{name}.shifted", br.target, cat)
    ws.add_diagram(out, br.diagram, cat, extra={"bar": {"source": name, "truncation": N}})
    ws.add_transformation(f"{name}.augmentation", br.augmentation, out, target)
    if top >= 0:
        _pointwise_checks(r, f"augmentation_we_through_{top}", br.augmentation.comps,
                          lambda m: we_through(m, top))
    for o in x.shape.objects:
        ok = br.diagram(o).is_cofibrant()
        r.add(f"cofibrant/{object_label(o)}", ok, None if ok else {"object": object_label(o)})
    r.data.update({"output": out, "truncation": trunc, "shift": br.shift,
                   "safe_range": [0, top] if top >= 0 else []})
    r.summary.append(f"truncation N = {N}; weak equivalence checked in degrees <= {top}")
    return r, ws


# weighted colimits -----------------------------------------------------------------


def cmd_wcolim(ws: Workspace, weight: str, diagram: str, truncation: int | None,
               check_quillen: str | None) -> Report:
    w, x = ws.diagram(weight), ws.diagram(diagram)
    we, de = ws.doc["diagrams"][weight], ws.doc["diagrams"][diagram]
    if we["category"] != de["category"] or bool(we.get("opposite")) == bool(de.get("opposite")):
        raise InputError(f"shape mismatch: weight {weight!r} must live on the opposite of the shape of {diagram!r}")
    r = Report("wcolim", data={"weight": weight, "diagram": diagram})
    _validate_diagram(ws, weight, r)
    _validate_diagram(ws, diagram, r)
    if not r.passed:
        return r
    safe = None
    if truncation is not None:
        N, trunc = clamp_truncation(truncation, DEFAULT_BAR_TRUNCATION)
        if de.get("opposite"):
            raise InputError("--truncation replaces the covariant diagram; swap weight and diagram")
        br = bar_replacement(x, N)
        x = br.diagram
        safe = br.safe_degree
        r.data["truncation"] = trunc
        r.data["safe_range"] = [0, safe] if safe >= 0 else []
    p = weighted_colimit(w, x).complex
    degs = _degrees(p, None)
    h = p.homology
    r.data["homology"] = homology_json(h, degs)
    if safe is None:
        r.summary.append(f"homology: {homology_text(h, degs)}")
    else:
        inside = [n for n in degs if n <= safe]
        outside = [n for n in degs if n > safe]
        r.summary.append(f"homology (safe range, degrees <= {safe}): {homology_text(h, inside)}")
        if outside:
            r.summary.append(f"beyond the safe range, truncation artefacts: {homology_text(h, outside)}")
    flat = {object_label(o): bool(is_flat(w(o))) for o in w.shape.objects}
    r.data["weight_pointwise_flat"] = flat
    if check_quillen is not None:
        f = ws.transformation(check_quillen)
        src = ws.doc["diagrams"][ws.doc["transformations"][check_quillen]["source"]]
        if src["category"] != de["category"] or bool(src.get("opposite")) != bool(de.get("opposite")):
            raise InputError(f"transformation {check_quillen!r} does not live on the diagram shape")
        bad = f.check_naturality()
        if bad:
            r.add(f"naturality/{check_quillen}", False,
                  {"square": [object_label(bad[0][0]), object_label(bad[0][1])]})
            return r
        r.add(f"pointwise_we/{check_quillen}", is_pointwise_we(f),
              None if is_pointwise_we(f) else {"objects": [object_label(o) for o, m in f.comps.items()
                                                           if not is_weak_equivalence(m)]})
        a, b = weighted_colimit(w, f.source), weighted_colimit(w, f.target)
        m = weighted_colimit_map(None, f, a, b, w=w)
        ok = is_weak_equivalence(m)
        r.add(f"quillen/{check_quillen}", ok, None if ok else {
            "source_homology": str(a.complex.homology), "target_homology": str(b.complex.homology),
            "weight_flat": flat})
    return r


# verify ------------------------------------------------------------------------------


def _validate_diagram(ws: Workspace, name: str, r: Report) -> None:
    bad = ws.action_problems(name)
    if bad:
        r.add(f"action/{name}", False, {"diagram": name, "failure": [str(v) for v in bad[0]]})


def verify_file(ws: Workspace, r: Report) -> None:
    for name in ws.names("complexes"):
        ws.complex(name)
        r.add(f"file/complex/{name}", True)
    for name in ws.names("categories"):
        bad = ws.category_problems(name)
        r.add(f"file/category/{name}", not bad, {"category": name, "failure": [str(v) for v in bad[0]]}
              if bad else None)
    for name in ws.names("diagrams"):
        bad = ws.action_problems(name)
        r.add(f"file/diagram/{name}", not bad, {"diagram": name, "failure": [str(v) for v in bad[0]]}
              if bad else None)
        entry = ws.doc["diagrams"][name]
        if "certificate" in entry:
            pres = ws.certificate(name)
            ok = pres.verify() and same_diagram(pres.result if pres.result is not None else pres.base,
                                                ws.diagram(name))
            r.add(f"file/certificate/{name}", ok, None if ok else {"diagram": name,
                                                                   "failure": "replay differs from the stored diagram"})
        if "bar" in entry:
            spec = entry["bar"]
            src = spec.get("source")
            if src not in ws.doc["diagrams"]:
                raise WorkspaceError(f"unknown diagram {src!r}", f"$.diagrams.{name}.bar.source")
            N = spec.get("truncation")
            if not isinstance(N, int) or N < 0:
                raise WorkspaceError("truncation must be a non-negative integer", f"$.diagrams.{name}.bar.truncation")
            br = bar_replacement(ws.diagram(src), N)
            ok = same_diagram(br.diagram, ws.diagram(name))
            r.add(f"file/bar/{name}", ok, None if ok else {"diagram": name,
                                                           "failure": "rebuilt bar construction differs"})
    for name in ws.names("transformations"):
        f = ws.transformation(name)
        bad = f.check_naturality()
        r.add(f"file/transformation/{name}", not bad,
              {"transformation": name, "square": [object_label(bad[0][0]), object_label(bad[0][1])]}
              if bad else None)


def cmd_verify(ws: Workspace, suite: str, seed: int) -> Report:
    r = Report("verify", data={"suite": suite, "seed": seed})
    verify_file(ws, r)
    r.extend(run_suite(suite, seed))
    failed = [c.name for c in r.checks if not c.passed]
    r.summary.append(f"{len(r.checks)} checks, {len(failed)} failed")
    return r


# entry point ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hocolim", description="Homotopy colimits of enriched diagrams of chain complexes.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("file", help="workspace JSON file")
        sp.add_argument("--format", choices=["json", "text"], default="text")
        sp.add_argument("--output", help="write the resulting workspace here")
        sp.add_argument("-v", "--verbose", action="store_true")

    sp = sub.add_parser("homology", help="homology of a complex")
    common(sp)
    sp.add_argument("name")
    sp = sub.add_parser("replace", help="cofibrant replacement of a diagram")
    common(sp)
    sp.add_argument("diagram")
    sp.add_argument("--mode", choices=["direct", "bar"], default="direct")
    sp.add_argument("--truncation", type=int)
    sp.add_argument("--away-from", default="", help="comma-separated objects")
    sp = sub.add_parser("wcolim", help="weighted colimit")
    common(sp)
    sp.add_argument("weight")
    sp.add_argument("diagram")
    sp.add_argument("--truncation", type=int, help="bar-replace the diagram first")
    sp.add_argument("--check-quillen", metavar="WE")
    sp = sub.add_parser("verify", help="run invariant suites")
    common(sp)
    sp.add_argument("--suite", choices=["axioms", "reedy", "bar", "counterexample", "all"], default="all")
    sp.add_argument("--seed", type=int, default=0)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="hocolim: %(message)s", stream=sys.stderr)
    try:
        ws = Workspace.read(args.file)
        if args.command == "homology":
            report = cmd_homology(ws, args.name)
        elif args.command == "replace":
            away = [a for a in args.away_from.split(",") if a]
            report, ws = cmd_replace(ws, args.diagram, args.mode, args.truncation, away)
        elif args.command == "wcolim":
            report = cmd_wcolim(ws, args.weight, args.diagram, args.truncation, args.check_quillen)
        else:
            report = cmd_verify(ws, args.suite, args.seed)
    except (InputError, WorkspaceError, MalformedComplex, MalformedMap, MalformedCategory,
            MalformedDiagram) as e:
        print(f"hocolim: error: {e}", file=sys.stderr)
        return 2
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(ws.dumps())
    out = report.render_json() if args.format == "json" else report.render_text()
    sys.stdout.write(out)
    return 0 if report.passed else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
