"""Command-line interface: ``odelin <command> EQ [options]``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .expr.numeric import DEFAULT_SEED
from .report import EXIT_INPUT, EXIT_VERIFICATION, PipelineOptions, Report, run_pipeline

PIPELINE_COMMANDS = ("check", "lie-verify", "lambda-verify", "transform-verify", "linearize", "solve")


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors: exit with status 3 rather than 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _hex(text: str) -> int:
    try:
        return int(text, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a hexadecimal seed: {text!r}") from None


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _params(text: str) -> tuple[str, ...]:
    return tuple(p for p in text.replace(",", " ").split() if p)


def _add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=_hex, default=d(DEFAULT_SEED), help="sampling seed in hex (default C0FFEE)")
    p.add_argument("--json", metavar="PATH", default=d(None), help="write the JSON report to PATH ('-' for stdout)")
    p.add_argument("--steps", type=_positive, default=d(1000), help="RK4 steps per unit interval (default 1000)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="odelin",
        description="Linearization of second-order ODEs y'' + F3 y'^3 + F2 y'^2 + F1 y' + F = 0 "
        "by point transformations, with exact verification.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("equation", metavar="EQ", help="equation text, e.g. \"y'' + 3*y*y' + y^3 = 0\"")
        p.add_argument("--param", type=_params, default=(), help="free parameter names, comma separated")
        _add_globals(p, suppress=True)
        return p

    cmd("check", "Lie-Tresse linearizability test only")
    p = cmd("lie-verify", "verify a candidate (w, z)")
    p.add_argument("--w", required=True)
    p.add_argument("--z", required=True)
    p = cmd("lambda-verify", "verify a lambda for the canonical pair (d/dy, lambda)")
    p.add_argument("--lambda", dest="lam", required=True)
    p = cmd("transform-verify", "verify a candidate point transformation")
    p.add_argument("--phi", required=True)
    p.add_argument("--psi", required=True)
    p.add_argument("--w")
    p.add_argument("--z")
    for name, help_text in (("linearize", "find and verify a linearizing transformation"),
                            ("solve", "linearize, then build and verify the general solution")):
        p = cmd(name, help_text)
        p.add_argument("--w")
        p.add_argument("--z")
        p.add_argument("--ansatz", metavar="LADDER",
                       help="comma-separated ladders (poly, inv-y, inv-linear) or 'basis: E1; E2; ...'")
        grp = p.add_mutually_exclusive_group()
        grp.add_argument("--g", help="solution of the third-order linear ODE (special class)")
        grp.add_argument("--h1", help="first solution of the second-order linear ODE (special class)")
        p.add_argument("--h2", help="second solution of the second-order linear ODE")
        if name == "solve":
            p.add_argument("--explicit", help="claimed explicit solution in x, c1, c2 to verify as well")

    p = sub.add_parser("corpus", help="run every *.json case in a directory")
    p.add_argument("directory", metavar="DIR")
    _add_globals(p, suppress=True)
    return parser


def options_from(ns: argparse.Namespace) -> PipelineOptions:
    return PipelineOptions(
        params=tuple(getattr(ns, "param", ()) or ()),
        w=getattr(ns, "w", None),
        z=getattr(ns, "z", None),
        lam=getattr(ns, "lam", None),
        phi=getattr(ns, "phi", None),
        psi=getattr(ns, "psi", None),
        ansatz=getattr(ns, "ansatz", None),
        g=getattr(ns, "g", None),
        h1=getattr(ns, "h1", None),
        h2=getattr(ns, "h2", None),
        explicit=getattr(ns, "explicit", None),
        seed=ns.seed,
        steps=ns.steps,
    )


def summary(rep: Report) -> str:
    lines = [f"equation: {rep.equation}", f"verdict:  {rep.verdict} (exit {rep.status})"]
    if rep.message:
        lines.append(f"note:     {rep.message}")
    if rep.coefficients:
        c = rep.coefficients
        lines.append(f"cubic:    F3 = {c['F3']}, F2 = {c['F2']}, F1 = {c['F1']}, F = {c['F']}")
    if rep.lie_tresse:
        r = rep.lie_tresse["residuals"]
        lines.append(f"L1, L2:   {r['first']['residual']}, {r['second']['residual']}")
    if rep.aux:
        lines.append(f"(w, z):   ({rep.aux['w']}, {rep.aux['z']}) [{rep.aux['provenance']}]")
    if rep.lam:
        lines.append(f"lambda:   {rep.lam['lambda']}")
    if rep.transform and "phi" in rep.transform:
        t = rep.transform
        lines.append(f"phi:      {t['phi']}")
        lines.append(f"psi:      {t['psi']}")
    if rep.general_solution:
        for label, g in sorted(rep.general_solution.items()):
            if g.get("implicit"):
                lines.append(f"solution: {g['implicit']}")
            if g.get("explicit"):
                lines.append(f"explicit: y = {g['explicit']} ({label}, {g['mode']})")
    if rep.singular_loci:
        lines.append("singular: " + "; ".join(f"{s} = 0" for s in rep.singular_loci))
    for w in rep.warnings:
        lines.append(f"warning:  {w}")
    if rep.verified:
        flags = ", ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in sorted(rep.verified.items()))
        lines.append(f"checks:   {flags}")
    return "\n".join(lines)


def _write_json(path: str, payload: str) -> None:
    if path == "-":
        sys.stdout.write(payload)
    else:
        Path(path).write_text(payload, encoding="utf-8")


CASE_KEYS = ("w", "z", "lam", "phi", "psi", "ansatz", "g", "h1", "h2", "explicit")


def run_corpus(directory: str, seed: int, steps: int) -> tuple[dict, int]:
    """Run every case file; exit 0 iff each status matches its ``expect`` (default 0)."""
    files = sorted(Path(directory).glob("*.json"))
    if not files:
        raise FileNotFoundError(f"no *.json cases in {directory}")
    results = {}
    worst = 0
    for f in files:
        case = json.loads(f.read_text(encoding="utf-8"))
        opts = PipelineOptions(params=tuple(case.get("params", ())), seed=seed, steps=steps)
        for k in CASE_KEYS:
            if k in case:
                setattr(opts, k, case[k])
        rep = run_pipeline(case.get("command", "solve"), case["equation"], opts)
        expect = case.get("expect", 0)
        ok = rep.status == expect
        results[f.stem] = {"expect": expect, "ok": ok, "report": rep.to_dict()}
        print(f"{'PASS' if ok else 'FAIL'} {f.stem}: {rep.verdict} (exit {rep.status}, expected {expect})")
        if not ok:
            worst = EXIT_VERIFICATION
    return results, worst


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.command == "corpus":
        try:
            results, status = run_corpus(ns.directory, ns.seed, ns.steps)
        except (OSError, ValueError, KeyError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        if ns.json:
            _write_json(ns.json, json.dumps(results, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
        return status
    rep = run_pipeline(ns.command, ns.equation, options_from(ns))
    print(summary(rep))
    if ns.json:
        _write_json(ns.json, rep.to_json())
    return rep.status


if __name__ == "__main__":
    sys.exit(main())
