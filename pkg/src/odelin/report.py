"""Pipeline orchestration and JSON reports."""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any

from .errors import (
    AnsatzExhausted,
    AuxInvalid,
    FirstIntegralCheckFailed,
    InputError,
    IntegrationUnavailable,
    NonConstant,
    NotInClass,
    SingularJacobian,
    SingularTrajectory,
    Unsolved,
    VerificationFailure,
)
from .expr import Expr, normalize, parse_expr
from .expr.numeric import DEFAULT_SEED, Verdict, is_zero
from .lambda_sym import AuxPair, aux_system_residuals, lambda_determining_expr, lambda_from_aux
from .lie import lie_conditions_residuals, trace_condition_residual
from .linearizability import lie_tresse_residuals
from .ode import CubicODE, parse_ode
from .special import (
    build_linear_odes,
    detect_special_class,
    solve_const_coeff,
    transforms_from_h,
    aux_from_g,
)
from .transform import (
    GeneralSolution,
    PointTransform,
    explicit_residual,
    first_integrals,
    general_solution,
    ladder_from_names,
    default_ladder,
    quotient_integral,
    s_system_residuals,
    solve_s_system,
    transform_matches_ode,
    user_rung,
    verify_general_solution,
)
from .validate import rk4_crosscheck, sample_residual

EXIT_OK = 0
EXIT_NOT_LINEARIZABLE = 1
EXIT_INCONCLUSIVE = 2
EXIT_INPUT = 3
EXIT_VERIFICATION = 4

RK4_TOL = 1e-5
SPOT_TOL = 1e-9
RK4_INTERVALS = ((0, 1), (1, 2), (2, 3), (-1, 0))


@dataclass
class PipelineOptions:
    params: tuple[str, ...] = ()
    w: str | None = None
    z: str | None = None
    lam: str | None = None
    phi: str | None = None
    psi: str | None = None
    ansatz: str | None = None
    g: str | None = None
    h1: str | None = None
    h2: str | None = None
    explicit: str | None = None
    seed: int = DEFAULT_SEED
    steps: int = 1000


@dataclass
class Report:
    command: str
    equation: str
    seed: str
    status: int = EXIT_OK
    verdict: str = ""
    stage: str = ""
    message: str = ""
    coefficients: dict[str, str] | None = None
    singular_loci: list[str] = field(default_factory=list)
    lie_tresse: dict[str, Any] | None = None
    special_class: dict[str, Any] | None = None
    aux: dict[str, Any] | None = None
    lam: dict[str, Any] | None = None
    transform: dict[str, Any] | None = None
    general_solution: dict[str, Any] | None = None
    numeric: dict[str, Any] | None = None
    warnings: list[str] = field(default_factory=list)
    verified: dict[str, bool] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


class _Stop(Exception):
    def __init__(self, status: int, verdict: str, message: str = ""):
        super().__init__(message)
        self.status = status
        self.verdict = verdict
        self.message = message


class _Run:
    def __init__(self, command: str, text: str, opts: PipelineOptions):
        self.opts = opts
        self.report = Report(command, text, hex(opts.seed))
        self.ode: CubicODE | None = None

    # helpers ---------------------------------------------------------------

    def parse(self, text: str | None, extra: tuple[str, ...] = ()) -> Expr | None:
        if text is None:
            return None
        return parse_expr(text, tuple(self.opts.params) + extra)

    def zero_check(self, label: str, exprs) -> tuple[dict, bool]:
        """Residual texts plus three-way verdicts; True only if all are exactly zero."""
        out = {}
        ok = True
        for name, e in exprs:
            v = is_zero(e, self.opts.seed)
            out[name] = {"residual": str(e), "verdict": v.value}
            if v is Verdict.NUMERIC_ONLY_ZERO:
                self.report.warnings.append(
                    f"{label}/{name}: vanishes at sample points but not symbolically; not treated as zero"
                )
            ok = ok and v is Verdict.ZERO
        return out, ok

    def stage(self, name: str) -> None:
        self.report.stage = name

    # stages ----------------------------------------------------------------

    def extract(self) -> CubicODE:
        self.stage("extract")
        ode = parse_ode(self.report.equation, self.opts.params)
        self.ode = ode
        self.report.coefficients = {k: str(v) for k, v in zip(("F3", "F2", "F1", "F"), ode.coefficients)}
        self.report.singular_loci = [str(s) for s in ode.singular_loci()]
        # flags kernel relations the normal form cannot see, e.g. ln(x*y) - ln(x) - ln(y)
        self.zero_check("coefficients", zip(("F3", "F2", "F1", "F"), ode.coefficients))
        return ode

    def lie_tresse(self) -> None:
        self.stage("lie-tresse")
        res = lie_tresse_residuals(self.ode, self.opts.seed)
        residuals, _ = self.zero_check("lie-tresse", [("first", res.first), ("second", res.second)])
        self.report.lie_tresse = {"residuals": residuals, "verdict": res.verdict}
        self.report.verified["lie_tresse"] = res.linearizable
        if res.proven_nonlinearizable:
            raise _Stop(EXIT_NOT_LINEARIZABLE, "not-linearizable", "Lie-Tresse invariants do not vanish")
        if not res.linearizable:
            raise _Stop(EXIT_INCONCLUSIVE, "undecided", "Lie-Tresse invariants vanish only numerically")

    def user_aux(self) -> AuxPair | None:
        o = self.opts
        if o.w is None and o.z is None:
            return None
        if o.w is None or o.z is None:
            raise InputError("--w and --z must be given together")
        return AuxPair(self.parse(o.w), self.parse(o.z))

    def check_aux(self, aux: AuxPair, provenance: str) -> bool:
        self.stage("aux")
        ode = self.ode
        lie, ok1 = self.zero_check("lie-conditions", zip(("w_x", "w_y", "z_x", "z_y"), lie_conditions_residuals(ode, aux)))
        red, ok2 = self.zero_check("reduced", zip(("w_y", "w_x-z_y", "z_x"), aux_system_residuals(ode, aux)))
        tr, ok3 = self.zero_check("trace", [("trace", trace_condition_residual(ode, aux))])
        self.report.aux = {
            "w": str(aux.w),
            "z": str(aux.z),
            "provenance": provenance,
            "lie_conditions": lie,
            "reduced_system": red,
            "trace_condition": tr,
        }
        lam = lambda_from_aux(ode, aux)
        raw = lambda_determining_expr(ode, lam.expr)
        lres, ok4 = self.zero_check("lambda", [("determining", normalize(raw).to_expr())])
        self.report.lam = {"lambda": str(lam), "determining": lres}
        self.report.verified.update(
            lie_conditions=ok1, reduced_system=ok2, trace_condition=ok3, lambda_determining=ok4
        )
        self.spot("lambda_determining", raw, ok4)
        if ok4 != ok2:
            raise _Stop(EXIT_VERIFICATION, "internal-error", "lambda residual and reduced system disagree")
        return ok1 and ok2 and ok3 and ok4

    def spot(self, name: str, raw: Expr, claimed_zero: bool) -> None:
        """Numeric spot check of an unsimplified residual that was proven zero."""
        if not claimed_zero:
            return
        num = self.report.numeric or {}
        try:
            m = sample_residual(raw, 10, self.opts.seed)
        except Exception as exc:  # noqa: BLE001 - singular sampling is reported, not fatal
            num[name] = {"skipped": str(exc)}
        else:
            num[name] = {"max_abs": m, "ok": m < SPOT_TOL}
            if m >= SPOT_TOL:
                self.report.numeric = num
                raise _Stop(EXIT_VERIFICATION, "internal-error", f"numeric spot check {name} = {m}")
        self.report.numeric = num

    def special_aux(self) -> AuxPair | None:
        try:
            sc = detect_special_class(self.ode)
        except NotInClass as exc:
            self.report.special_class = {"member": False, "reason": str(exc)}
            return None
        self.sc = sc
        third, second = build_linear_odes(sc)
        info = {
            "member": True,
            "a": str(sc.a),
            "b": str(sc.b),
            "c": str(sc.c),
            "d": str(sc.d),
            "third_order": str(third),
            "second_order": str(second),
        }
        self.report.special_class = info
        if self.opts.g is not None:
            g = self.parse(self.opts.g)
        elif normalize(sc.d).is_zero:
            g = parse_expr("1")
        else:
            try:
                g = solve_const_coeff(third).functions[0]
            except (Unsolved, NonConstant) as exc:
                self.report.warnings.append(f"no solution of the third-order ODE: {exc}")
                return None
        info["g"] = str(g)
        return aux_from_g(sc, g)

    def find_aux(self) -> tuple[AuxPair, str] | None:
        aux = self.user_aux()
        self.sc = None
        if aux is not None:
            try:
                self.special_aux()
            except Exception:  # noqa: BLE001 - informational only
                pass
            return aux, "user"
        aux = self.special_aux()
        if aux is not None:
            return aux, "special-class g"
        return None

    def ladder(self):
        text = self.opts.ansatz
        if text is None:
            return default_ladder()
        if text.startswith("basis:"):
            items = [s for s in text[len("basis:"):].split(";") if s.strip()]
            return [user_rung([self.parse(s) for s in items])]
        try:
            return ladder_from_names([s.strip() for s in text.split(",") if s.strip()])
        except ValueError as exc:
            raise InputError(str(exc)) from None

    def find_transform(self, aux: AuxPair, provenance: str) -> tuple[PointTransform, str]:
        self.stage("transform")
        o = self.opts
        if o.phi is not None or o.psi is not None:
            if o.phi is None or o.psi is None:
                raise InputError("--phi and --psi must be given together")
            return PointTransform(self.parse(o.phi), self.parse(o.psi)), "user"
        sc = getattr(self, "sc", None)
        if sc is not None and provenance == "special-class g" and normalize(sc.d).is_zero:
            try:
                if o.h1 is not None and o.h2 is not None:
                    h1, h2 = self.parse(o.h1), self.parse(o.h2)
                else:
                    h1, h2 = solve_const_coeff(build_linear_odes(sc)[1]).functions
                tr = transforms_from_h(sc, h1, h2)
                self.report.special_class["h"] = [str(h1), str(h2)]
                return tr, "special-class h"
            except (Unsolved, IntegrationUnavailable) as exc:
                self.report.warnings.append(f"closed-form transformation unavailable: {exc}")
        sol = solve_s_system(self.ode, aux, self.ladder())
        self.report.transform = {
            "s_solutions": [str(s) for s in sol.solutions],
            "pair": list(sol.pair),
            "rung": sol.rung,
        }
        return sol.transform, "ansatz"

    def check_transform(self, tr: PointTransform, source: str, aux: AuxPair | None) -> bool:
        self.stage("transform-check")
        info = self.report.transform or {}
        info.update(phi=str(tr.phi), psi=str(tr.psi), source=source, jacobian=str(tr.jacobian()))
        self.report.transform = info
        match = transform_matches_ode(tr, self.ode)
        res, ok = self.zero_check("pushforward", zip(("F3", "F2", "F1", "F"), match.residuals))
        info["pushforward_residuals"] = res
        self.report.verified["pushforward_match"] = ok
        if not ok:
            return False
        try:
            I1, I2 = first_integrals(tr, self.ode)
            I3 = quotient_integral(tr, self.ode)
        except FirstIntegralCheckFailed as exc:
            self.report.verified["first_integrals"] = False
            raise _Stop(EXIT_VERIFICATION, "internal-error", str(exc)) from None
        info["first_integrals"] = {"I1": str(I1.expr), "I2": str(I2.expr), "I3": str(I3.expr)}
        self.report.verified["first_integrals"] = True
        if aux is not None:
            srs = {}
            all_zero = True
            for nm, S in (("phi", tr.phi), ("psi", tr.psi)):
                r, okS = self.zero_check("s-system", zip(("e1", "e2", "e3"), s_system_residuals(S, self.ode, aux)))
                srs[nm] = r
                all_zero = all_zero and okS
            info["s_system"] = srs
            if source == "ansatz":
                self.report.verified["s_system"] = all_zero
                if not all_zero:
                    raise _Stop(EXIT_VERIFICATION, "internal-error", "ansatz solution fails the S-system")
        return True

    def solve(self, tr: PointTransform) -> None:
        self.stage("general-solution")
        gs = general_solution(tr, self.opts.params)
        self.check_gs(gs, "derived")
        if self.opts.explicit is not None:
            ex = self.parse(self.opts.explicit, gs.constants)
            self.check_gs(GeneralSolution(None, None, gs.constants, ex), "claimed")

    def check_gs(self, gs: GeneralSolution, label: str) -> None:
        ver = verify_general_solution(self.ode, gs)
        entry = {"explicit": str(gs.explicit) if gs.explicit is not None else None, "mode": ver.mode}
        if gs.phi is not None:
            entry["implicit"] = gs.implicit_text()
        if ver.explicit_residual is not None:
            entry["explicit_residual"] = str(ver.explicit_residual)
        gsr = self.report.general_solution or {}
        gsr[label] = entry
        self.report.general_solution = gsr
        self.report.verified[f"general_solution_{label}"] = ver.ok
        if not ver.ok:
            status = EXIT_VERIFICATION if label == "derived" else EXIT_INCONCLUSIVE
            raise _Stop(status, "verification-failed", f"{label} general solution does not verify")
        if gs.explicit is not None:
            self.rk4(gs, label)

    def rk4(self, gs: GeneralSolution, label: str) -> None:
        rng = random.Random(self.opts.seed)
        names = list(gs.constants) + list(self.opts.params)
        num = self.report.numeric or {}
        entry: dict[str, Any] = {"skipped": "no regular trajectory found"}
        for attempt in range(12):
            consts = {n: Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 4)) for n in names}
            if attempt == 0:
                consts.update({gs.constants[0]: Fraction(0), gs.constants[1]: Fraction(1)})
            for iv in RK4_INTERVALS:
                step = (iv[1] - iv[0]) / self.opts.steps
                try:
                    dev = rk4_crosscheck(self.ode, gs.explicit, consts, iv, step)
                except SingularTrajectory:
                    continue
                entry = {
                    "constants": {k: str(v) for k, v in consts.items()},
                    "interval": list(iv),
                    "steps": self.opts.steps,
                    "max_deviation": dev,
                    "ok": dev < RK4_TOL,
                }
                break
            else:
                continue
            break
        num[f"rk4_{label}"] = entry
        self.report.numeric = num
        if "ok" in entry:
            self.report.verified[f"rk4_{label}"] = entry["ok"]
            if not entry["ok"]:
                raise _Stop(EXIT_VERIFICATION, "internal-error", f"RK4 deviation {entry['max_deviation']}")
        else:
            self.report.warnings.append("RK4 cross-check skipped: every trial trajectory was singular")


def run_pipeline(command: str, text: str, opts: PipelineOptions | None = None) -> Report:
    """Run ``command`` (check, lie-verify, lambda-verify, transform-verify,
    linearize or solve) on the equation ``text`` and return the report."""
    opts = opts or PipelineOptions()
    run = _Run(command, text, opts)
    rep = run.report
    try:
        run.extract()
        run.lie_tresse()
        if command == "check":
            raise _Stop(EXIT_OK, "linearizable")
        if command == "lambda-verify":
            if opts.lam is None:
                raise InputError("--lambda is required")
            run.stage("lambda")
            lam = run.parse(opts.lam)
            raw = lambda_determining_expr(run.ode, lam)
            res, ok = run.zero_check("lambda", [("determining", normalize(raw).to_expr())])
            rep.lam = {"lambda": str(lam), "determining": res}
            rep.verified["lambda_determining"] = ok
            raise _Stop(EXIT_OK if ok else EXIT_INCONCLUSIVE, "lambda-symmetry" if ok else "not-a-lambda-symmetry")
        if command == "lie-verify":
            aux = run.user_aux()
            if aux is None:
                raise InputError("--w and --z are required")
            ok = run.check_aux(aux, "user")
            raise _Stop(EXIT_OK if ok else EXIT_INCONCLUSIVE, "aux-verified" if ok else "aux-rejected")
        if command == "transform-verify":
            if opts.phi is None or opts.psi is None:
                raise InputError("--phi and --psi are required")
            aux = run.user_aux()
            if aux is not None:
                run.check_aux(aux, "user")
            tr = PointTransform(run.parse(opts.phi), run.parse(opts.psi))
            ok = run.check_transform(tr, "user", aux)
            raise _Stop(EXIT_OK if ok else EXIT_INCONCLUSIVE, "transform-verified" if ok else "transform-rejected")
        if command not in ("linearize", "solve"):
            raise InputError(f"unknown command {command!r}")
        run.ladder()  # reject a malformed --ansatz before any search
        found = run.find_aux()
        if found is None:
            raise _Stop(EXIT_INCONCLUSIVE, "inconclusive", "no (w, z) available: supply --w and --z")
        aux, provenance = found
        if not run.check_aux(aux, provenance):
            status = EXIT_INCONCLUSIVE if provenance == "user" else EXIT_VERIFICATION
            raise _Stop(status, "aux-rejected", "(w, z) does not satisfy the Lie conditions")
        tr, source = run.find_transform(aux, provenance)
        if not run.check_transform(tr, source, aux):
            status = EXIT_INCONCLUSIVE if source == "user" else EXIT_VERIFICATION
            raise _Stop(status, "transform-rejected", "transformation does not map the ODE to u'' = 0")
        if command == "solve":
            run.solve(tr)
        raise _Stop(EXIT_OK, "linearizable")
    except _Stop as stop:
        rep.status, rep.verdict, rep.message = stop.status, stop.verdict, stop.message
    except InputError as exc:
        rep.status, rep.verdict, rep.message = EXIT_INPUT, "input-error", f"{type(exc).__name__}: {exc}"
    except (AnsatzExhausted, AuxInvalid) as exc:
        rep.status, rep.verdict, rep.message = EXIT_INCONCLUSIVE, "inconclusive", f"{type(exc).__name__}: {exc}"
    except (SingularJacobian, VerificationFailure) as exc:
        rep.status, rep.verdict, rep.message = EXIT_VERIFICATION, "internal-error", f"{type(exc).__name__}: {exc}"
    if rep.status == EXIT_OK and not all(rep.verified.values()):
        failed = sorted(k for k, v in rep.verified.items() if not v)
        rep.status, rep.verdict = EXIT_VERIFICATION, "internal-error"
        rep.message = "unbacked verification flags: " + ", ".join(failed)
    return rep
