"""``bnctl``: attractors and target control of asynchronous Boolean networks."""
from __future__ import annotations

import argparse
import json
import logging
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .control import Mode, release_region, solve, verify_ptc, verify_ttc
from .dynamics import (Attractor, admissible_space, compute_attractors,
                       strong_basin, weak_basin)
from .model import BooleanNetwork, ModelError, parse_control, parse_network
from .symbolic import Schema, StateSet, Universe, apply_control_set, largest_cube

logger = logging.getLogger("bnctl")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# report pieces


def _state_dict(bn: BooleanNetwork, state) -> dict:
    return {name: int(b) for name, b in zip(bn.names, state)}


def _literals(bn: BooleanNetwork, c) -> list[dict]:
    return [{"node": bn.names[i], "value": v} for i, v in c.literals()]


def _attractor_entry(bn: BooleanNetwork, a: Attractor) -> dict:
    size = a.size()
    cube = largest_cube(a.states)
    return {
        "index": a.index,
        "kind": a.kind.value,
        "size": size,
        "witness": _state_dict(bn, a.witness()),
        "schema": str(cube) if cube.size() == size else None,
    }


def _base_report(path: str, bn: BooleanNetwork, command: str, params: dict) -> dict:
    return {
        "model": {"name": Path(path).stem, "n": bn.n, "nodes": list(bn.names)},
        "command": command,
        "params": params,
        "attractors": [],
        "results": [],
        "timing_ms": 0.0,
    }


def select_target(bn: BooleanNetwork, attractors: list[Attractor], selector: str) -> Attractor:
    """Resolve an attractor index, a bit pattern, or ``name=value`` literals.

    A string of ``0``, ``1`` and ``*`` of length n is a pattern; other
    all-digit strings are indices.
    """
    selector = selector.strip()
    universe = attractors[0].states.universe if attractors else None
    if re.fullmatch(r"[01*]+", selector) and len(selector) == bn.n:
        region = universe.from_schema(Schema.parse(selector))
    elif selector.isdigit():
        i = int(selector)
        if i >= len(attractors):
            raise UsageError(f"no attractor with index {i} (found {len(attractors)})")
        return attractors[i]
    else:
        try:
            c = parse_control(selector, bn)
        except (KeyError, ValueError) as exc:
            raise UsageError(f"bad target selector {selector!r}: {exc}") from None
        region = universe.controlled_space(c)
    hits = [a for a in attractors if not (a.states & region).is_empty()]
    if not hits:
        raise UsageError(f"target {selector!r} matches no attractor")
    if len(hits) > 1:
        raise UsageError(f"target {selector!r} matches attractors "
                         f"{[a.index for a in hits]}")
    return hits[0]


def _control_entry(bn, result) -> dict:
    return {
        "target": result.target_index,
        "mode": result.mode.value,
        "threshold": result.threshold,
        "schemata": len(result.schemata),
        "skipped_schemata": len(result.skipped),
        "verifications": result.verifications,
        "controls": [
            {
                "literals": _literals(bn, c),
                "size": c.size,
                "schema": result.provenance[c].schema,
                "verified": result.provenance[c].verified,
            }
            for c in result.controls
        ],
    }


def _analyse(text: str):
    bn = parse_network(text)
    universe = Universe(bn.n)
    adm = admissible_space(bn, universe)
    return bn, universe, adm, compute_attractors(bn, adm)


def _solve_one(args):
    # worker entry: each process builds its own universe
    text, mode, index, threshold = args
    bn, _, adm, attractors = _analyse(text)
    return _control_entry(bn, solve(mode, bn, attractors[index], threshold, adm))


# ---------------------------------------------------------------------------
# commands


def cmd_attractors(path: str) -> dict:
    start = time.perf_counter()
    text = _read(path)
    bn, universe, adm, attractors = _analyse(text)
    report = _base_report(path, bn, "attractors", {})
    for a in attractors:
        entry = _attractor_entry(bn, a)
        entry["weak_basin"] = weak_basin(bn, a.states, adm).count()
        entry["strong_basin"] = strong_basin(bn, a.states, adm).count()
        report["attractors"].append(entry)
    report["timing_ms"] = _elapsed(start)
    return report


def cmd_control(path: str, mode: str, target: str | None, threshold: int | None = None,
                all_targets: bool = False, jobs: int = 1) -> dict:
    start = time.perf_counter()
    if threshold is not None and threshold < 0:
        raise UsageError("threshold must be non-negative")
    if not all_targets and target is None:
        raise UsageError("give --target or --all-targets")
    mode = Mode(mode)
    text = _read(path)
    bn, universe, adm, attractors = _analyse(text)
    params = {"mode": mode.value, "threshold": bn.n if threshold is None else threshold,
              "target": None if all_targets else target, "all_targets": all_targets}
    report = _base_report(path, bn, "control", params)
    report["attractors"] = [_attractor_entry(bn, a) for a in attractors]
    if all_targets:
        targets = [a.index for a in attractors]
    else:
        targets = [select_target(bn, attractors, target).index]
    if jobs > 1 and len(targets) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            report["results"] = list(pool.map(
                _solve_one, [(text, mode, i, threshold) for i in targets]))
    else:
        report["results"] = [
            _control_entry(bn, solve(mode, bn, attractors[i], threshold, adm))
            for i in targets
        ]
    report["timing_ms"] = _elapsed(start)
    return report


def cmd_verify(path: str, mode: str, target: str, literals: str) -> dict:
    start = time.perf_counter()
    mode = Mode(mode)
    text = _read(path)
    bn, universe, adm, attractors = _analyse(text)
    try:
        c = parse_control(literals, bn)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc).strip("'\"")) from None
    a = select_target(bn, attractors, target)
    report = _base_report(path, bn, "verify",
                          {"mode": mode.value, "target": target,
                           "control": _literals(bn, c)})
    report["attractors"] = [_attractor_entry(bn, a) for a in attractors]
    phi = apply_control_set(c, adm)
    entry = {"target": a.index, "mode": mode.value, "control": _literals(bn, c),
             "size": c.size}
    if mode is Mode.ITC:
        entry["valid"] = phi <= strong_basin(bn, a.states, adm)
    elif mode is Mode.TTC:
        sb = strong_basin(bn, a.states, adm)
        entry["valid"] = verify_ttc(bn, c, sb, phi)
        entry["release_region_size"] = release_region(sb, c).count()
    else:
        entry["valid"] = verify_ptc(bn, c, a.states, phi)
    report["results"] = [entry]
    report["timing_ms"] = _elapsed(start)
    return report


def cmd_oracle(path: str) -> dict:
    """Explicit-state cross-check of attractors and basin sizes."""
    from .oracle import ExplicitSystem, decode

    start = time.perf_counter()
    bn = parse_network(_read(path))
    system = ExplicitSystem(bn)
    report = _base_report(path, bn, "oracle", {})
    for i, comp in enumerate(system.attractors()):
        report["attractors"].append({
            "index": i,
            "kind": "singleton" if len(comp) == 1 else "cyclic",
            "size": len(comp),
            "witness": _state_dict(bn, decode(comp[0], bn.n)),
            "schema": None,
            "weak_basin": int(system.weak_basin(comp).sum()),
            "strong_basin": int(system.strong_basin(comp).sum()),
        })
    report["timing_ms"] = _elapsed(start)
    return report


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _elapsed(start: float) -> float:
    return round((time.perf_counter() - start) * 1000.0, 3)


# ---------------------------------------------------------------------------
# output


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def to_text(report: dict) -> str:
    model = report["model"]
    lines = [f"model {model['name']}: {model['n']} nodes"]
    for a in report["attractors"]:
        state = "".join(str(v) for v in a["witness"].values())
        line = f"  attractor {a['index']}: {a['kind']}, {a['size']} state(s), e.g. {state}"
        if a.get("schema"):
            line += f" [{a['schema']}]"
        if "weak_basin" in a:
            line += f"; weak basin {a['weak_basin']}, strong basin {a['strong_basin']}"
        lines.append(line)
    for r in report["results"]:
        if "controls" in r:
            lines.append(f"{r['mode'].upper()} for attractor {r['target']} "
                         f"(threshold {r['threshold']}): {len(r['controls'])} control(s)")
            for c in r["controls"]:
                lits = ", ".join(f"{l['node']}={l['value']}" for l in c["literals"]) or "(none)"
                lines.append(f"  {{{lits}}}  size {c['size']}")
        else:
            lits = ", ".join(f"{l['node']}={l['value']}" for l in r["control"]) or "(none)"
            verdict = "valid" if r["valid"] else "not valid"
            line = f"{r['mode'].upper()} {{{lits}}} for attractor {r['target']}: {verdict}"
            if "release_region_size" in r:
                line += f"; release region {r['release_region_size']} state(s)"
            lines.append(line)
    lines.append(f"time {report['timing_ms']:.1f} ms")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bnctl", description="Target control of asynchronous Boolean networks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="{attractors,control,verify}")

    def common(p):
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("model", help="BoolNet-style model file")

    p = sub.add_parser("attractors", help="list attractors and basin sizes")
    common(p)

    p = sub.add_parser("control", help="compute target controls")
    p.add_argument("--mode", required=True, choices=[m.value for m in Mode])
    p.add_argument("--target", help="attractor index, state pattern (e.g. 000), "
                                    "or literals (e.g. 'x1=0,x2=0')")
    p.add_argument("--threshold", type=int, default=None,
                   help="largest control size to keep (default: node count)")
    p.add_argument("--all-targets", action="store_true", help="solve for every attractor")
    p.add_argument("--jobs", type=int, default=1, help="processes for --all-targets")
    common(p)

    p = sub.add_parser("verify", help="check one control")
    p.add_argument("--mode", required=True, choices=[m.value for m in Mode])
    p.add_argument("--target", required=True)
    p.add_argument("--set", dest="literals", required=True, help="e.g. 'x1=0,x2=1'")
    common(p)

    p = sub.add_parser("oracle", help=argparse.SUPPRESS)
    common(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "attractors":
            report = cmd_attractors(args.model)
        elif args.command == "control":
            report = cmd_control(args.model, args.mode, args.target, args.threshold,
                                 args.all_targets, args.jobs)
        elif args.command == "verify":
            report = cmd_verify(args.model, args.mode, args.target, args.literals)
        else:
            report = cmd_oracle(args.model)
    except (ModelError, UsageError) as exc:
        print(f"bnctl: error: {exc}", file=sys.stderr)
        return 1
    print(to_json(report) if args.format == "json" else to_text(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
