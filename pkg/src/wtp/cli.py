"""Configuration ingestion, command dispatch, and machine-readable reporting.

Commands: entropy, dimension, estimate, variational, check.  Configs and
reports are JSON; floats are emitted with Python's shortest round-trip
representation, so re-running on a report's echoed config reproduces the
numbers bit for bit.  Exit codes: 0 success, 1 validation error,
2 computation error, 3 invariant-suite failure.
"""
from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
from dataclasses import dataclass, field

from . import __version__
from .checks import run_all_checks
from .errors import (
    ComputationError,
    NotAligned,
    ParseError,
    UnsupportedCombination,
    ValidationError,
    WtpError,
)
from .estimator import DEFAULT_BUDGET, entropy_estimate
from .sofic import (
    AMBIGUITY_WARNING,
    sofic_dimension_report,
    sofic_weighted_entropy_closed_form,
)
from .sponge import (
    Potential,
    hausdorff_dimension,
    kp_recursion,
    minkowski_dimension,
)
from .symbolic import (
    LabeledGraph,
    SoficChain,
    SpongeChain,
    validate_digit_system,
)
from .variational import maximize_bernoulli
from .weights import Exponents, exponents_from_bases

COMMANDS = ("entropy", "dimension", "estimate", "variational", "check")
DEFAULT_N_MAX = 12
DEFAULT_MAX_ITERS = 100_000
DEFAULT_TOLERANCE = 1e-12


@dataclass
class RunConfig:
    raw: dict
    chain: SpongeChain | SoficChain
    exponents: Exponents
    exponents_from_bases: bool
    potential: Potential | None
    n_max: int
    budget: int
    max_iters: int
    tolerance: float


@dataclass
class Report:
    command: str
    provenance: dict
    closed_form: dict | None = None
    estimate_series: list | None = None
    variational: dict | None = None
    checks: list | None = None
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "closed_form": self.closed_form,
            "estimate_series": self.estimate_series,
            "variational": self.variational,
            "checks": self.checks,
            "warnings": self.warnings,
            "provenance": self.provenance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)


def _expect(doc, key, kind, path):
    if key not in doc:
        raise ParseError(f"{path}.{key}", "missing")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(f"{path}.{key}", f"expected {kind}, got {type(value).__name__}")
    return value


def parse_config(doc) -> RunConfig:
    """Validate a config document (dict or JSON text) and fill defaults."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as e:
            raise ParseError("$", f"invalid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ParseError("$", "top level must be an object")

    system = _expect(doc, "system", dict, "$")
    kinds = [k for k in ("sponge", "sofic") if k in system]
    if len(kinds) != 1:
        raise ParseError("$.system", "exactly one of 'sponge' or 'sofic' required")
    kind = kinds[0]
    body = _expect(system, kind, dict, "$.system")
    bases = _expect(body, "bases", list, f"$.system.{kind}")
    if kind == "sponge":
        digits = _expect(body, "digits", list, "$.system.sponge")
        digit_system = validate_digit_system(bases, [tuple(d) for d in digits])
        chain: SpongeChain | SoficChain = SpongeChain(digit_system)
    else:
        vertices = _expect(body, "vertices", list, "$.system.sofic")
        edges = _expect(body, "edges", list, "$.system.sofic")
        bases_t = tuple(int(m) for m in bases)
        # labels live in the full product alphabet of the bases
        full = list(itertools.product(*(range(m) for m in bases_t)))
        digit_system = validate_digit_system(bases_t, full)
        parsed_edges = []
        for k, e in enumerate(edges):
            if not (isinstance(e, list) and len(e) == 3):
                raise ParseError(f"$.system.sofic.edges[{k}]", "expected [source, target, [digit...]]")
            src, dst, label = e
            parsed_edges.append((str(src), str(dst), tuple(int(c) for c in label)))
        graph = LabeledGraph(
            vertices=tuple(str(v) for v in vertices),
            edges=tuple(parsed_edges),
            system=digit_system,
        )
        chain = SoficChain(graph)

    r = chain.rank
    exponents_raw = doc.get("exponents", "from-bases")
    if exponents_raw == "from-bases":
        exponents = exponents_from_bases(chain.system.bases)
        from_bases = True
    elif isinstance(exponents_raw, list):
        if len(exponents_raw) != r - 1:
            raise ParseError("$.exponents", f"need {r - 1} entries for rank {r}")
        exponents = Exponents(tuple(float(x) for x in exponents_raw))
        from_bases = False
    else:
        raise ParseError("$.exponents", "expected 'from-bases' or a list of reals")

    potential = None
    if doc.get("potential") is not None:
        pot = _expect(doc, "potential", dict, "$")
        window = int(_expect(pot, "window", int, "$.potential"))
        table_raw = _expect(pot, "table", list, "$.potential")
        table = {}
        for k, entry in enumerate(table_raw):
            if not (isinstance(entry, list) and len(entry) == 2):
                raise ParseError(f"$.potential.table[{k}]", "expected [word, value]")
            word, value = entry
            table[tuple(tuple(int(c) for c in d) for d in word)] = float(value)
        potential = Potential(window=window, table=table)

    est = doc.get("estimator") or {}
    opt = doc.get("optimizer") or {}
    return RunConfig(
        raw=doc,
        chain=chain,
        exponents=exponents,
        exponents_from_bases=from_bases,
        potential=potential,
        n_max=int(est.get("n_max", DEFAULT_N_MAX)),
        budget=int(est.get("budget", DEFAULT_BUDGET)),
        max_iters=int(opt.get("max_iters", DEFAULT_MAX_ITERS)),
        tolerance=float(opt.get("tolerance", DEFAULT_TOLERANCE)),
    )


def _sponge_closed_form(config: RunConfig) -> dict:
    sys_ = config.chain.system
    if config.potential is None:
        table = kp_recursion(sys_, config.exponents)
    else:
        table = kp_recursion(sys_, config.exponents, config.potential)
    return {
        "h_a_nats": math.log(table.z0),
        "z0": table.z0,
        "hausdorff_dimension": hausdorff_dimension(sys_),
        "minkowski_dimension": minkowski_dimension(sys_),
    }


def _sofic_closed_form(config: RunConfig) -> dict:
    chain = config.chain
    h = sofic_weighted_entropy_closed_form(chain, config.exponents)
    return {
        "h_a_nats": h,
        "h_over_log_m1": h / math.log(chain.system.bases[0]),
        "bracket_value": math.exp(h),
    }


def run(config: RunConfig, command: str) -> Report:
    """Dispatch a command; numeric work is delegated to the library modules."""
    if command not in COMMANDS:
        raise UnsupportedCombination(f"unknown command {command!r}")
    report = Report(
        command=command,
        provenance={"config": config.raw, "version": __version__},
    )
    sponge = isinstance(config.chain, SpongeChain)

    if command == "check":
        results = run_all_checks()
        report.checks = [
            {"name": r.name, "passed": r.passed, "detail": r.detail} for r in results
        ]
        if not all(r.passed for r in results):
            report.warnings.append("invariant suite failed")
        return report

    if command == "variational":
        if not sponge:
            raise UnsupportedCombination("variational optimization is restricted to sponge chains")
        if config.potential is not None and config.potential.window != 1:
            raise UnsupportedCombination("variational optimization takes window-1 potentials")
        closed = _sponge_closed_form(config)
        dist, value = maximize_bernoulli(
            config.chain.system,
            config.exponents,
            config.potential,
            max_iters=config.max_iters,
            tolerance=config.tolerance,
        )
        report.closed_form = closed
        report.variational = {
            "value": value.value,
            "gap_to_closed_form": closed["h_a_nats"] - value.value,
            "maximizer": [
                [list(d), p] for d, p in sorted(dist.probs.items())
            ],
        }
        return report

    if command == "estimate":
        closed_form = _closed_form_or_none(config, report)
        series = entropy_estimate(
            config.chain,
            config.exponents,
            config.potential,
            n_max=config.n_max,
            budget=config.budget,
            closed_form=None if closed_form is None else closed_form["h_a_nats"],
        )
        report.closed_form = closed_form
        report.estimate_series = [
            {"n": n, "log_s_over_n": v, "fekete_bound": b}
            for (n, v), b in zip(series.entries, series.fekete_bounds)
        ]
        return report

    if command == "dimension":
        if sponge:
            report.closed_form = _sponge_closed_form(config)
        else:
            rep = sofic_dimension_report(config.chain, config.exponents)
            report.closed_form = {
                "h_a_nats": rep.h_a_nats,
                "h_over_log_m1": rep.h_over_log_m1,
                "bracket_value": math.exp(rep.h_a_nats),
            }
            report.warnings.append(rep.warning)
        return report

    # entropy: closed form when available, estimator fallback otherwise
    closed_form = _closed_form_or_none(config, report)
    report.closed_form = closed_form
    if closed_form is None:
        series = entropy_estimate(
            config.chain,
            config.exponents,
            config.potential,
            n_max=config.n_max,
            budget=config.budget,
        )
        report.estimate_series = [
            {"n": n, "log_s_over_n": v, "fekete_bound": b}
            for (n, v), b in zip(series.entries, series.fekete_bounds)
        ]
    return report


def _closed_form_or_none(config: RunConfig, report: Report) -> dict | None:
    if isinstance(config.chain, SpongeChain):
        if config.potential is not None and config.potential.window != 1:
            report.warnings.append(
                "closed form unavailable: potentials wider than window 1 are estimator-only"
            )
            return None
        return _sponge_closed_form(config)
    if config.potential is not None:
        report.warnings.append("closed form unavailable: sofic chains with potentials are estimator-only")
        return None
    try:
        closed = _sofic_closed_form(config)
    except (NotAligned, ComputationError) as e:
        report.warnings.append(f"closed form unavailable: {e}")
        return None
    report.warnings.append(AMBIGUITY_WARNING)
    return closed


def _format_table(report: Report) -> str:
    lines = [f"command: {report.command}"]
    if report.closed_form:
        for key, value in report.closed_form.items():
            lines.append(f"{key:>22}: {value!r}")
    if report.estimate_series:
        lines.append(f"{'N':>4} {'log S_N / N':>22} {'fekete bound':>22}")
        for row in report.estimate_series:
            lines.append(f"{row['n']:>4} {row['log_s_over_n']:>22.16f} {row['fekete_bound']:>22.16f}")
    if report.variational:
        lines.append(f"{'variational value':>22}: {report.variational['value']!r}")
        lines.append(f"{'gap to closed form':>22}: {report.variational['gap_to_closed_form']!r}")
    if report.checks is not None:
        for row in report.checks:
            lines.append(f"{'PASS' if row['passed'] else 'FAIL'} {row['name']}: {row['detail']}")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="wtp",
        description="Weighted topological entropy and pressure of symbolic chains.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to a JSON config")
    parser.add_argument("--n-max", type=int, default=None, help="override estimator n_max")
    parser.add_argument(
        "--threads",
        type=int,
        default=os.cpu_count() or 1,
        help="worker hint; results are scheduling-independent and bit-stable",
    )
    parser.add_argument("--format", choices=("json", "table"), default="json")
    args = parser.parse_args(argv)

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = parse_config(fh.read())
        if args.n_max is not None:
            config.n_max = args.n_max
        env_budget = os.environ.get("WTP_BUDGET")
        if env_budget:
            config.budget = int(env_budget)
        report = run(config, args.command)
    except (ValidationError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except WtpError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    print(report.to_json() if args.format == "json" else _format_table(report))
    if report.checks is not None and not all(r["passed"] for r in report.checks):
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
