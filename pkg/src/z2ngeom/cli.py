"""Command-line front end: ``z2ngeom <command> --spec FILE``.

Every command prints a JSON (or text) report to stdout or ``--out`` and a
one-line summary to stderr.  Exit codes: 0 PASS, 1 FAIL, 2 ERROR.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time

from .atlas import check_group_object
from .domains import (
    berezin_satisfies_propagation,
    berezin_to_morphism,
    morphism_to_berezin,
    separating_witness,
)
from .errors import (
    GluingError,
    GradingError,
    NoWitnessError,
    SpecError,
    StructureError,
    ValidationError,
    Z2nError,
)
from .galgebra import make_algebra
from .laws import check_ring_laws
from .points import check_lambda0_linearity, check_naturality_square, evaluate
from .rotations import formal_rotation, pairing_algebra, random_rotation_blocks
from .sampling import lambda0_samples, random_points
from .specfile import SpecDocument
from .verdicts import CheckResult, jsonable

REPORT_VERSION = 1
COMMANDS = ("laws", "eval", "naturality", "classify", "separate", "cocycle", "group", "rotate")
EXIT = {"PASS": 0, "FAIL": 1, "ERROR": 2}

DEFAULT_LAW_ALGEBRAS = ((1, (3,)), (2, (1, 1, 1)), (3, (1, 1, 1, 1, 1, 1, 1)))


class Outcome:
    """Accumulates per-item results for one command."""

    def __init__(self):
        self.results = []
        self.witnesses = []
        self.ks = []
        self.samples = 0
        self.notes = []
        self.failed = False

    def add(self, label, check: CheckResult | None = None, **extra):
        item = {"item": label, **extra}
        if check is not None:
            item["verdict"] = check.verdict
            self.samples += check.samples_run
            if check.effective_truncation is not None:
                self.ks.append(check.effective_truncation)
            if check.numeric:
                item["numeric"] = True
            for n in check.notes:
                if n not in self.notes:
                    self.notes.append(n)
            if not check.passed:
                self.failed = True
                self.witnesses.extend({"item": label, **jsonable(w)} for w in check.witnesses)
        self.results.append(jsonable(item))

    def fail(self, label, witness, **extra):
        self.failed = True
        self.witnesses.append(jsonable({"item": label, **witness}))
        self.results.append(jsonable({"item": label, "verdict": "FAIL", **extra}))


def _items(spec: SpecDocument, name):
    section = spec.section(name)
    if section is None:
        raise SpecError(f"spec has no {name!r} section")
    return section if isinstance(section, list) else [section]


def _transformation(spec, item):
    if "morphism" in item:
        return spec.morphism(item["morphism"])
    if "berezin" in item:
        return spec.berezin(item["berezin"])
    raise SpecError("item needs a 'morphism' or 'berezin' reference")


def _label(item, i):
    if isinstance(item, dict):
        for key in ("name", "morphism", "berezin", "manifold"):
            if isinstance(item.get(key), str):
                return item[key]
    if isinstance(item, str):
        return item
    return f"#{i}"


# ---------------------------------------------------------------------------
# commands


def cmd_laws(spec, args, out: Outcome):
    if spec is not None and spec.section("algebras"):
        algebras = [(name, spec.algebra(name)) for name in spec.section("algebras")]
    else:
        algebras = [(f"n={n} q={q}", make_algebra(n, q, args.truncation)) for n, q in DEFAULT_LAW_ALGEBRAS]
    for i, (name, alg) in enumerate(algebras):
        count = args.samples if args.samples is not None else 100
        out.add(name, check_ring_laws(alg, seed=args.seed + i, pairs=count, triples=count))


def cmd_eval(spec, args, out: Outcome):
    for i, item in enumerate(_items(spec, "eval")):
        F = _transformation(spec, item)
        pt = spec.point(item["point"])
        image = evaluate(F, pt)
        K = image.truncation
        if "expect" in item:
            want = spec.point(item["expect"])
            k = min(K, want.truncation)
            ok = image.truncate(k) == want.truncate(k)
            check = CheckResult(ok, [] if ok else [{"got": image.to_json(), "expected": want.to_json()}],
                                samples_run=1, effective_truncation=k)
        else:
            check = CheckResult(True, [], samples_run=1, effective_truncation=K)
        out.add(_label(item, i), check, image=image.to_json())


def _count(args, default):
    return args.samples if args.samples is not None else default


def cmd_naturality(spec, args, out: Outcome):
    for i, item in enumerate(_items(spec, "naturality")):
        F = _transformation(spec, item)
        psi = spec.algebra_morphism(item["algebra_morphism"])
        pts = random_points(F.source, psi.source, seed=args.seed + i, count=_count(args, 10))
        out.add(_label(item, i), check_naturality_square(F, psi, pts))


def _documented_samples(spec, item):
    out = []
    for s in item.get("samples", []):
        pt = spec.point(s["point"])
        v = spec.tangent(s["tangent"])
        a = pt.algebra.parse(str(s["scalar"]))
        out.append((pt, v, a))
    return out


def cmd_classify(spec, args, out: Outcome):
    for i, item in enumerate(_items(spec, "classify")):
        F = _transformation(spec, item)
        label = _label(item, i)
        berezin = morphism_to_berezin(F) if hasattr(F, "pullbacks") else F
        prop = berezin_satisfies_propagation(berezin)
        extra = {"propagation": prop.verdict}
        checks = [prop]
        if prop.passed and berezin.is_polynomial:
            back = berezin_to_morphism(berezin)
            extra["morphism"] = [
                {",".join(map(str, a)): str(c) for a, c in sorted(fam.items())} for fam in back.pullbacks
            ]
        if berezin.is_polynomial:
            samples = _documented_samples(spec, item) or lambda0_samples(
                berezin.source, seed=args.seed + i, count=_count(args, 10), K=args.truncation
            )
            lin = check_lambda0_linearity(berezin, samples)
            extra["lambda0_linearity"] = lin.verdict
            checks.append(lin)
        merged = CheckResult(
            all(c.passed for c in checks),
            [w for c in checks for w in c.witnesses],
            samples_run=sum(c.samples_run for c in checks),
            effective_truncation=min(c.effective_truncation for c in checks if c.effective_truncation is not None),
            numeric=any(c.numeric for c in checks),
            notes=[n for c in checks for n in c.notes],
        )
        out.add(label, merged, **extra)


def cmd_separate(spec, args, out: Outcome):
    for i, item in enumerate(_items(spec, "separate")):
        phi, psi = spec.morphism(item["phi"]), spec.morphism(item["psi"])
        label = _label(item, i) if "name" in item else f"{_label(item['phi'], i)} vs {_label(item['psi'], i)}"
        try:
            alg, pt = separating_witness(phi, psi)
        except NoWitnessError as exc:
            out.fail(label, {"reason": str(exc)})
            continue
        check = CheckResult(True, [], samples_run=1, effective_truncation=alg.truncation)
        out.add(label, check, algebra={"n": alg.n, "q": list(alg.q), "K": alg.truncation},
                point=pt.to_json(), phi_image=evaluate(phi, pt).to_json(),
                psi_image=evaluate(psi, pt).to_json())


def cmd_cocycle(spec, args, out: Outcome):
    refs = spec.section("cocycle")
    if refs is None:
        refs = list(spec.section("manifolds") or {})
        if not refs:
            raise SpecError("spec has no manifolds")
    for i, ref in enumerate(refs if isinstance(refs, list) else [refs]):
        label = _label(ref, i)
        try:
            M = spec.manifold(ref)
        except GluingError as exc:
            out.fail(label, {"reason": str(exc), **(exc.witness or {})})
            continue
        except StructureError as exc:
            out.fail(label, {"reason": str(exc)})
            continue
        out.add(label, M.report, charts=[c.index for c in M.charts],
                transitions=[list(k) for k in sorted(M.transitions)])


def cmd_group(spec, args, out: Outcome):
    for i, item in enumerate(_items(spec, "group")):
        mu, inv = spec.morphism(item["mu"]), spec.morphism(item["inv"])
        unit = spec.point(item["unit"])
        algebras = [spec.algebra(a) for a in item["algebras"]]
        out.add(_label(item, i) if "name" in item else f"#{i}",
                check_group_object(mu, inv, unit, algebras, seed=args.seed + i, count=_count(args, 20)))


def cmd_rotate(spec, args, out: Outcome):
    for i, item in enumerate(_items(spec, "rotate")):
        alg = spec.algebra(item["algebra"])
        pa = pairing_algebra(alg, int(item["p"]), item.get("formal_q", [0] * len(alg.q)))
        label = _label(item, i) if "name" in item else f"#{i}"
        if "blocks" in item:
            plans = [item["blocks"]]
        else:
            rng = random.Random(args.seed + i)
            plans = [random_rotation_blocks(rng, pa) for _ in range(_count(args, 10))]
        failure = None
        for j, blocks in enumerate(plans):
            try:
                formal_rotation(pa, blocks)
            except (ValidationError, GradingError) as exc:
                failure = {"plan": j, "reason": str(exc)}
                break
        if failure:
            out.fail(label, failure)
        else:
            out.add(label, CheckResult(True, [], samples_run=len(plans), effective_truncation=alg.truncation))


HANDLERS = {
    "laws": cmd_laws,
    "eval": cmd_eval,
    "naturality": cmd_naturality,
    "classify": cmd_classify,
    "separate": cmd_separate,
    "cocycle": cmd_cocycle,
    "group": cmd_group,
    "rotate": cmd_rotate,
}


# ---------------------------------------------------------------------------
# reports


def _report(command, verdict, out: Outcome | None, error=None, started=None, timing=False):
    report = {
        "report_version": REPORT_VERSION,
        "command": command,
        "verdict": verdict,
        "witnesses": out.witnesses if out else [],
        "effective_truncation": min(out.ks) if out and out.ks else None,
        "samples_run": out.samples if out else 0,
        "wall_time": round(time.perf_counter() - started, 6) if timing and started else None,
        "results": out.results if out else [],
        "notes": out.notes if out else [],
    }
    if error is not None:
        report["error"] = error
    return report


def run_one(command, spec, args):
    started = time.perf_counter()
    out = Outcome()
    try:
        HANDLERS[command](spec, args, out)
    except (Z2nError, KeyError, TypeError, ValueError) as exc:
        msg = f"{type(exc).__name__}: {exc}"
        return _report(command, "ERROR", out, error=msg, started=started, timing=args.timing)
    verdict = "FAIL" if out.failed else "PASS"
    return _report(command, verdict, out, started=started, timing=args.timing)


def run_all(spec, args):
    started = time.perf_counter()
    present = [c for c in COMMANDS
               if c == "laws" or (c == "cocycle" and spec.section("manifolds")) or spec.section(c) is not None]
    subs = [run_one(c, spec, args) for c in present]
    verdicts = {r["verdict"] for r in subs}
    verdict = "ERROR" if "ERROR" in verdicts else "FAIL" if "FAIL" in verdicts else "PASS"
    ks = [r["effective_truncation"] for r in subs if r["effective_truncation"] is not None]
    return {
        "report_version": REPORT_VERSION,
        "command": "report-all",
        "verdict": verdict,
        "witnesses": [{"command": r["command"], **w} for r in subs for w in r["witnesses"]],
        "effective_truncation": min(ks) if ks else None,
        "samples_run": sum(r["samples_run"] for r in subs),
        "wall_time": round(time.perf_counter() - started, 6) if args.timing else None,
        "reports": subs,
    }


def format_text(report) -> str:
    lines = [f"{report['command']}: {report['verdict']}"]
    lines.append(f"  effective truncation K={report['effective_truncation']}, samples run: {report['samples_run']}")
    if report.get("error"):
        lines.append(f"  error: {report['error']}")
    for r in report.get("results", []):
        lines.append(f"  - {r.get('item')}: {r.get('verdict', '?')}")
    for w in report["witnesses"]:
        lines.append(f"  witness: {json.dumps(w, sort_keys=True)}")
    for sub in report.get("reports", []):
        lines.extend("  " + line for line in format_text(sub).splitlines())
    for n in report.get("notes", []):
        lines.append(f"  note: {n}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="z2ngeom", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS + ("report-all",))
    parser.add_argument("--spec", help="JSON spec document")
    parser.add_argument("--truncation", type=int, default=6, help="default truncation order K")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--samples", type=int, default=None, help="samples per harness item")
    parser.add_argument("--out", help="write the report here instead of stdout")
    parser.add_argument("--format", choices=("json", "text"), default="json")
    parser.add_argument("--timing", action="store_true", help="record wall_time (breaks byte-identity)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.truncation < 0:
        parser.error("--truncation must be nonnegative")
    if args.samples is not None and args.samples < 1:
        parser.error("--samples must be positive")
    spec = None
    load_error = None
    if args.spec:
        try:
            spec = SpecDocument.load(args.spec, args.truncation)
        except Z2nError as exc:
            load_error = f"{type(exc).__name__}: {exc}"
    elif args.command != "laws":
        load_error = f"command {args.command!r} needs --spec"
    if load_error:
        report = _report(args.command, "ERROR", None, error=load_error)
    elif args.command == "report-all":
        report = run_all(spec, args)
    else:
        report = run_one(args.command, spec, args)
    text = format_text(report) if args.format == "text" else json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    first = format_text(report).splitlines()[0]
    sys.stderr.write(first + (f" ({report['error']})" if report.get("error") else "") + "\n")
    return EXIT[report["verdict"]]


if __name__ == "__main__":
    sys.exit(main())
