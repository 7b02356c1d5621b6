"""Scenario runner: binds fixtures and seeded random matrices to the
structure-theorem checks and emits deterministic JSON or text reports.

Exit codes: 0 all checks pass, 1 some check failed, 2 a resource budget was
exhausted, 3 configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from .biratio import (
    build_inversion_data,
    cremona_jacobian_identity,
    dmap_resolution_check,
    inverse_representatives,
    kernel_presentation,
    source_inversion_factor,
    w_nzd_check,
)
from .errors import BudgetExceededError, InversionFailure, SymdetError
from .groebner import (
    GroebnerConfig,
    HilbertSeries,
    hilbert_series,
    ideal_membership,
    krull_dimension,
)
from .linmat import (
    LinearFormMatrix,
    MatrixSpec,
    certify,
    eta_matrix_rank,
    expected_fitting_codim,
    fixture_matrix,
    minors_ideal,
    random_general_matrix,
    signed_maximal_minors,
)
from .ring import FieldSpec, Polynomial, RingSpec, field_from_label, prime_field
from .sympow import eisenbud_mazur_check, fresh_generators, symbolic_power

__all__ = ["ScenarioConfig", "VerificationReport", "run_scenario", "emit_report", "main", "SCENARIOS"]

_DEFAULT_PRIME = 32003
_CHAR0_SCENARIOS = {"cremona", "eima", "implicit-core"}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    m: int = 0  # 0 = scenario default
    n: int = 3
    seed: int = 1
    field: FieldSpec | None = None
    fixture: str | None = None
    dmax: int = 5
    rmax: int = 3
    budget_secs: float | None = None

    def resolved_field(self) -> FieldSpec:
        if self.field is not None:
            return self.field
        if self.scenario in _CHAR0_SCENARIOS:
            return FieldSpec("q")
        return prime_field(_DEFAULT_PRIME)

    def groebner_config(self) -> GroebnerConfig:
        if self.budget_secs is None:
            return GroebnerConfig()
        return GroebnerConfig(deadline=time.monotonic() + self.budget_secs)


@dataclass
class CheckRecord:
    name: str
    status: str  # "pass" | "fail" | "budget-exceeded"
    witness: str = ""
    seconds: float = 0.0


@dataclass
class VerificationReport:
    scenario: str
    params: dict
    checks: list[CheckRecord] = field(default_factory=list)
    engine_version: str = __version__
    field_mode: str = "char-0"

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    @property
    def budget_hit(self) -> bool:
        return any(c.status == "budget-exceeded" for c in self.checks)

    def exit_code(self) -> int:
        if self.budget_hit:
            return 2
        return 0 if self.passed else 1


class _Runner:
    """Collects check outcomes; a budget error stops the scenario."""

    def __init__(self, report: VerificationReport):
        self.report = report

    def check(self, name: str, fn) -> bool:
        t0 = time.monotonic()
        try:
            outcome = fn()
        except BudgetExceededError as exc:
            self.report.checks.append(
                CheckRecord(name, "budget-exceeded", str(exc), time.monotonic() - t0)
            )
            raise
        except SymdetError as exc:
            self.report.checks.append(CheckRecord(name, "fail", str(exc), time.monotonic() - t0))
            return False
        dt = time.monotonic() - t0
        if outcome is True or outcome is None:
            self.report.checks.append(CheckRecord(name, "pass", "", dt))
            return True
        witness = outcome if isinstance(outcome, str) else "check returned false"
        self.report.checks.append(CheckRecord(name, "fail", witness, dt))
        return False


def _matrix_for(cfg: ScenarioConfig, m: int, n: int):
    fld = cfg.resolved_field()
    if cfg.fixture:
        return fixture_matrix(cfg.fixture, fld), None
    L, cert = random_general_matrix(MatrixSpec(m, n, fld, cfg.seed))
    return L, cert


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------


def _scenario_fitting(cfg: ScenarioConfig, run: _Runner):
    m = cfg.m or 4
    n = cfg.n
    L, cert = _matrix_for(cfg, m, n)
    if cert is None:
        cert = certify(L)
    for t, expected, actual in cert.entries:
        run.check(
            f"codim-I{t}",
            lambda e=expected, a=actual: True if e == a else f"expected {e}, computed {a}",
        )


def _scenario_sat_powers(cfg: ScenarioConfig, run: _Runner):
    m = cfg.m or 4
    n = cfg.n
    gcfg = cfg.groebner_config()
    L, _ = _matrix_for(cfg, m, n)
    I = minors_ideal(L, min(L.shape))
    rmax = cfg.rmax or (n - 1)
    for r in range(1, rmax + 1):
        res = symbolic_power(I, r, gcfg)
        expected_equal = (r <= n - 2) or (m < n)
        run.check(
            f"power-r{r}-{'equal' if expected_equal else 'strict'}",
            lambda res=res, exp=expected_equal: True
            if res.equal == exp
            else f"equality flag {res.equal}, expected {exp}",
        )
    if m >= n and rmax >= n - 1:
        res = symbolic_power(I, n - 1, gcfg)
        delta = signed_maximal_minors(L)
        for idx, rep in enumerate(inverse_representatives(L)):
            D = source_inversion_factor(delta, rep)
            run.check(
                f"witness-D{idx + 1}",
                lambda D=D, res=res: True
                if ideal_membership(D, res.symbolic) and not ideal_membership(D, res.ordinary)
                else "factor not strictly between the powers",
            )


def _scenario_cremona(cfg: ScenarioConfig, run: _Runner):
    n = cfg.n
    if cfg.resolved_field().kind != "q":
        raise ValueError("cremona scenario requires the rationals")
    L, _ = _matrix_for(cfg, n, n)
    delta = signed_maximal_minors(L)
    reps = inverse_representatives(L)
    D = source_inversion_factor(delta, reps[0])
    run.check("inversion-congruence", lambda: True)  # cross-checked during construction
    rep = cremona_jacobian_identity(delta, reps[0], D)
    run.check(
        "factor-is-jacobian-over-n-1",
        lambda: True if rep.factor_is_det_ratio else "det(Theta)/(n-1) differs from the factor",
    )
    run.check(
        "jacobian-product-identity",
        lambda: True
        if rep.product_identity
        else f"product != (degD+1)*D^n, scalar {rep.product_scalar}",
    )
    I = minors_ideal(L, n - 1)
    res = symbolic_power(I, n - 1, cfg.groebner_config())
    run.check(
        "factor-strictly-symbolic",
        lambda: True
        if ideal_membership(D, res.symbolic) and not ideal_membership(D, res.ordinary)
        else "factor not strictly between the powers",
    )


def _scenario_eima(cfg: ScenarioConfig, run: _Runner):
    L, _ = _matrix_for(cfg, 3, 3)
    table = eisenbud_mazur_check(L, cfg.dmax, cfg.groebner_config())
    for row in table.rows:
        run.check(
            f"annihilator-d{row.d}",
            lambda row=row: True
            if row.annihilator_matches
            else "annihilator differs from the expected power of the irrelevant ideal",
        )
        run.check(
            f"product-formula-d{row.d}",
            lambda row=row: True if row.power_formula_matches else "product formula mismatch",
        )


def _scenario_eta(cfg: ScenarioConfig, run: _Runner):
    n = cfg.n
    L, _ = _matrix_for(cfg, n + 1, n)
    _, rank = eta_matrix_rank(L)
    expected = 8 if cfg.fixture == "tchernev" else n * n
    run.check(
        "eta-rank",
        lambda: True if rank == expected else f"rank {rank}, expected {expected}",
    )
    if cfg.fixture in ("tchernev", "tchernev-perturbed-1", "tchernev-perturbed-2"):
        def build_fails():
            try:
                build_inversion_data(L, cfg.groebner_config())
            except InversionFailure as exc:
                return True if exc.reason in ("codim", "division", "cross-check") else str(exc)
            return "inversion data built despite the special matrix"

        run.check("inversion-failure-reported", build_fails)


def _scenario_implicit_core(cfg: ScenarioConfig, run: _Runner):
    n = cfg.n
    gcfg = cfg.groebner_config()
    L, _ = _matrix_for(cfg, n + 1, n)
    data = build_inversion_data(L, gcfg)
    I = minors_ideal(L, n)
    res1 = symbolic_power(I, 1, gcfg)
    fresh = fresh_generators(I, 2, [res1], gcfg)
    want_deg = n * (n - 1) - 1
    run.check(
        "fresh-generators",
        lambda: True
        if dict(fresh) == {want_deg: n}
        else f"fresh degrees {dict(fresh)}, expected {{{want_deg}: {n}}}",
    )
    res = dmap_resolution_check(data, gcfg)
    run.check("resolution-complex", lambda: True if res.complex_left and res.complex_right else "composites do not vanish")
    run.check("adjugate-form", lambda: True if res.adjugate_matches else "adjugate differs from (x_i D_j)")
    run.check(
        "resolution-codims",
        lambda: True
        if res.codim_middle == 2 and res.codim_tail == n
        else f"codims ({res.codim_middle}, {res.codim_tail})",
    )
    run.check(
        "resolution-shifts",
        lambda: True
        if res.shifts == (n * n, n * n - 1, n * (n - 1) - 1)
        else f"shifts {res.shifts}",
    )
    run.check(
        "deep-factor-degree",
        lambda: True
        if data.e_factor.total_degree() == n * (n * (n - 1) - 2)
        else f"deg E = {data.e_factor.total_degree()}",
    )
    run.check(
        "power-identity",
        lambda: True if data.g_factor == data.e_factor ** (n - 1) else "G != E^(n-1)",
    )


def _scenario_kernel_pi(cfg: ScenarioConfig, run: _Runner):
    n = cfg.n
    gcfg = cfg.groebner_config()
    L, _ = _matrix_for(cfg, n + 1, n)
    data = build_inversion_data(L, gcfg)
    P = kernel_presentation(data, None, gcfg)
    counts = P.counts()
    expected = (n, n, n * n, n + 1, n)
    run.check(
        "generator-counts",
        lambda: True if counts == expected else f"counts {counts}, expected {expected}",
    )
    run.check("map-vanishing", lambda: True)  # verified during assembly
    run.check(
        "codimension",
        lambda: True if P.codim == 2 * n + 1 else f"codim {P.codim}, expected {2 * n + 1}",
    )


def _scenario_w_nzd(cfg: ScenarioConfig, run: _Runner):
    n = cfg.n
    gcfg = cfg.groebner_config()
    L, _ = _matrix_for(cfg, n + 1, n)
    data = build_inversion_data(L, gcfg)
    P = kernel_presentation(data, None, gcfg)
    rep = w_nzd_check(P, gcfg)
    run.check(
        "quotient-stable",
        lambda: True if rep.quotient_equal else "colon by w enlarges the presentation ideal",
    )
    run.check(
        "no-w-lead-terms",
        lambda: True
        if rep.lead_terms_with_w == 0
        else f"{rep.lead_terms_with_w} lead terms divisible by w",
    )


_EXPECTED_SERIES = HilbertSeries((1, 7, 13, 7, 1), (1, 1, 1, 1))


def _scenario_hilbert_symbolic(cfg: ScenarioConfig, run: _Runner):
    n = cfg.n
    if n != 3:
        raise ValueError("the Hilbert-series scenario is pinned to n = 3")
    gcfg = cfg.groebner_config()
    L, _ = _matrix_for(cfg, n + 1, n)
    data = build_inversion_data(L, gcfg)
    P = kernel_presentation(data, None, gcfg)
    weights = [1] * (P.ring.nvars - 1) + [2]  # w carries weight 2
    series = hilbert_series(P.ideal, weights, gcfg)
    run.check(
        "weighted-hilbert-series",
        lambda: True if series == _EXPECTED_SERIES else f"series {series}",
    )


def _scenario_erratic(cfg: ScenarioConfig, run: _Runner):
    m = cfg.m or 7
    n = cfg.n
    gcfg = cfg.groebner_config()
    L, _ = _matrix_for(cfg, m, n)
    I = minors_ideal(L, m - 1)
    res1 = symbolic_power(I, 1, gcfg)
    fresh = fresh_generators(I, 2, [res1], gcfg)
    if m == 7:
        run.check(
            "three-degree-10-generators",
            lambda: True if fresh.get(10, 0) == 3 else f"degree-10 count {fresh.get(10, 0)}",
        )
    else:
        low = (m - 1) * (n - 1) - 1
        run.check(
            f"degree-{low}-generators-present",
            lambda: True if fresh.get(low, 0) >= 1 else f"no fresh generators of degree {low}",
        )


SCENARIOS = {
    "fitting": _scenario_fitting,
    "sat-powers": _scenario_sat_powers,
    "cremona": _scenario_cremona,
    "eima": _scenario_eima,
    "eta": _scenario_eta,
    "implicit-core": _scenario_implicit_core,
    "kernel-pi": _scenario_kernel_pi,
    "w-nzd": _scenario_w_nzd,
    "hilbert-symbolic": _scenario_hilbert_symbolic,
    "erratic": _scenario_erratic,
}


def run_scenario(cfg: ScenarioConfig) -> VerificationReport:
    """Run one registered scenario; failures are recorded, budgets short-circuit."""
    if cfg.scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {cfg.scenario!r}; have {sorted(SCENARIOS)}")
    fld = cfg.resolved_field()
    params = {
        "m": cfg.m,
        "n": cfg.n,
        "seed": cfg.seed,
        "field": fld.label(),
        "fixture": cfg.fixture or "",
        "dmax": cfg.dmax,
        "rmax": cfg.rmax,
    }
    report = VerificationReport(
        scenario=cfg.scenario,
        params=params,
        field_mode="char-0" if fld.kind == "q" else "prime-proxy",
    )
    runner = _Runner(report)
    try:
        SCENARIOS[cfg.scenario](cfg, runner)
    except BudgetExceededError as exc:
        if not report.budget_hit:  # budget hit outside any named check
            report.checks.append(CheckRecord("scenario-setup", "budget-exceeded", str(exc)))
    return report


def emit_report(report: VerificationReport, fmt: str = "json") -> bytes:
    """Stable-key JSON (timings omitted for byte determinism) or a text table."""
    if fmt == "json":
        doc = {
            "scenario": report.scenario,
            "params": report.params,
            "engineVersion": report.engine_version,
            "fieldMode": report.field_mode,
            "checks": [
                {"name": c.name, "status": c.status, "witness": c.witness}
                for c in report.checks
            ],
            "passed": report.passed,
        }
        return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode()
    if fmt == "text":
        lines = [
            f"scenario {report.scenario}  [{report.field_mode}]  engine {report.engine_version}",
            f"params: {json.dumps(report.params, sort_keys=True)}",
        ]
        for c in report.checks:
            mark = {"pass": "ok", "fail": "FAIL", "budget-exceeded": "BUDGET"}[c.status]
            line = f"  [{mark:6s}] {c.name} ({c.seconds:.2f}s)"
            if c.witness:
                line += f" :: {c.witness}"
            lines.append(line)
        lines.append("result: " + ("PASS" if report.passed else "FAIL"))
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown format {fmt!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValueError(message)


def main(argv: list[str] | None = None) -> int:
    parser = _Parser(prog="symdet", description="verification scenario runner")
    parser.add_argument("scenario", help=f"one of {sorted(SCENARIOS)}")
    parser.add_argument("--m", type=int, default=0)
    parser.add_argument("--n", type=int, default=3)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--field", type=str, default=None, help="q or fp:<prime>")
    parser.add_argument("--fixture", type=str, default=None)
    parser.add_argument("--dmax", type=int, default=5)
    parser.add_argument("--rmax", type=int, default=3)
    parser.add_argument("--budget-secs", type=float, default=None)
    parser.add_argument("--out", type=str, default=None)
    parser.add_argument("--format", type=str, default="json", choices=["json", "text"])
    try:
        args = parser.parse_args(argv)
        cfg = ScenarioConfig(
            scenario=args.scenario,
            m=args.m,
            n=args.n,
            seed=args.seed,
            field=field_from_label(args.field) if args.field else None,
            fixture=args.fixture,
            dmax=args.dmax,
            rmax=args.rmax,
            budget_secs=args.budget_secs,
        )
        if cfg.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {cfg.scenario!r}")
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    try:
        report = run_scenario(cfg)
    except (SymdetError, ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    payload = emit_report(report, args.format)
    if args.out:
        tmp = args.out + ".tmp"
        with open(tmp, "wb") as fh:
            fh.write(payload)
        import os

        os.replace(tmp, args.out)
    else:
        sys.stdout.buffer.write(payload)
    return report.exit_code()


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
