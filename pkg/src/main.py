"""
ybmarkov - integrable Markov models from set-theoretical Yang-Baxter solutions

Builds exact generators for Lyubashenko models, general solution families
and twisted SSEPs, verifies their integrability, enumerates sectors, and
studies quenches between twists.

Usage:
    python -m src.main verify models/family.txt
    python -m src.main integrability models/lyub.txt
    python -m src.main sectors models/twist.txt --members
    python -m src.main count --twist "(0 1)(2)" -L 3
    python -m src.main stationary models/twist.txt
    python -m src.main branch --from "(0 1 2 3)" --to "(0 2)(1 3)" -L 3
    python -m src.main quench --schedule quench.txt
    python -m src.main evolve models/twist.txt --start 0,0 -t 5 --steps 10
    python -m src.main sample models/twist.txt --start 0,0 --t-max 5 --count 100
    python -m src.main export models/twist.txt
    python -m src.main repro

Exit codes:
    0  every check passed
    1  a check failed
    2  usage, parse or precondition error
"""

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from src.config import Settings
from src.core.audit import CheckLedger, audited
from src.core.exceptions import ModelError, PreconditionError
from src.core.report import CheckReport

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _load_model(path: str):
    from src.harness.modelfile import parse_model

    return parse_model(Path(path).read_text(encoding="utf-8"))


def _parse_sites(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"configuration must look like 0,1,2, got {text!r}") from e


def _emit(records, fmt: str) -> None:
    from src.harness.output import render

    sys.stdout.write(render(records, fmt))


def _run_checks(checks, ledger: CheckLedger, fmt: str) -> int:
    """Run (name, thunk) pairs through the ledger and print a report table."""
    from src.harness.output import report_records

    reports: list[CheckReport] = []
    for name, thunk in checks:
        thunk.__name__ = name
        reports.append(audited(ledger)(thunk)())
    _emit(report_records(reports), fmt)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_verify(args, settings: Settings, ledger: CheckLedger) -> int:
    from src.algebra.ybe import (
        check_braided_ybe,
        check_family_relations,
        check_involutive,
        check_spectral_ybe_grid,
        general_map,
    )

    parsed = _load_model(args.model)
    cap = settings.report_cap
    if parsed.kind == "family":
        m = general_map(parsed.family)
    else:
        m = parsed.two_site_map()

    checks = [
        ("check_involutive", lambda: check_involutive(m, cap=cap)),
        ("check_braided_ybe", lambda: check_braided_ybe(m, cap=cap, workers=settings.workers)),
    ]
    if parsed.kind == "family":
        checks.append(("check_family_relations", lambda: check_family_relations(parsed.family, cap=cap)))
    if args.spectral:
        checks.append(("check_spectral_ybe_grid", lambda: check_spectral_ybe_grid(m, cap=cap)))
    return _run_checks(checks, ledger, args.format)


def cmd_integrability(args, settings: Settings, ledger: CheckLedger) -> int:
    from src.algebra.ybe import TwoSiteMap
    from src.models.conjugation import check_conjugation_identity, check_family_nonequivalence
    from src.models.transfer import check_hamiltonian_extraction, check_integrable_twist, check_transfer_commutation

    parsed = _load_model(args.model)
    m = parsed.two_site_map()
    twist = parsed.twist
    bound, cap = settings.max_states, settings.report_cap

    checks = [
        ("check_hamiltonian_extraction",
         lambda: check_hamiltonian_extraction(m, parsed.L, twist=twist, max_states=bound, cap=cap)),
        ("check_transfer_commutation",
         lambda: check_transfer_commutation(m, parsed.L, twist=twist, max_states=bound, cap=cap)),
    ]
    if parsed.kind == "twisted_ssep":
        checks.append(("check_integrable_twist",
                       lambda: check_integrable_twist(TwoSiteMap.flip(parsed.N), twist, Fraction(1, 2), Fraction(1, 5))))
    if parsed.kind == "lyubashenko":
        checks.append(("check_conjugation_identity",
                       lambda: check_conjugation_identity(parsed.g, parsed.L, max_states=bound, cap=cap)))
    if parsed.kind == "family" and not parsed.family.is_lyubashenko():
        checks.append(("check_family_nonequivalence",
                       lambda: check_family_nonequivalence(parsed.family, parsed.L, max_states=bound, cap=cap)))
    return _run_checks(checks, ledger, args.format)


def cmd_sectors(args, settings: Settings, ledger: CheckLedger) -> int:
    from src.sectors.engine import enumerate_sectors

    parsed = _load_model(args.model)
    M = parsed.generator(max_states=settings.max_states)
    records = []
    for s in enumerate_sectors(M, twist=parsed.sector_twist):
        record = {
            "id": s.id,
            "representative": s.representative,
            "profile": str(s.profile) if s.profile else "",
            "charge": str(s.charge) if s.charge else "",
            "size": s.size,
        }
        if args.members:
            record["members"] = s.members
        records.append(record)
    _emit(records, args.format)
    return EXIT_OK


def _twist(text: str, n: int | None):
    from src.algebra.permutation import Permutation

    return Permutation.parse(text, n=n)


def cmd_count(args, settings: Settings, ledger: CheckLedger) -> int:
    from src.sectors.counting import (
        compositions,
        count_sectors_closed_form,
        count_sectors_equal_cycles,
        sector_cardinality_closed_form,
    )

    f = _twist(args.twist, args.N)
    records = [{"quantity": "sectors", "profile": "", "value": count_sectors_closed_form(f, args.L)}]
    lengths = set(f.cycles.lengths)
    if len(lengths) == 1:
        records.append({
            "quantity": "sectors_equal_cycles",
            "profile": "",
            "value": count_sectors_equal_cycles(f.n, len(f.cycles), args.L),
        })
    if args.cardinalities:
        for profile in compositions(len(f.cycles), args.L):
            records.append({
                "quantity": "cardinality",
                "profile": profile,
                "value": sector_cardinality_closed_form(f, profile),
            })
    _emit(records, args.format)
    return EXIT_OK


def cmd_stationary(args, settings: Settings, ledger: CheckLedger) -> int:
    from src.sectors.engine import check_stationary, enumerate_sectors, generator_kernel_dimension, stationary_state

    parsed = _load_model(args.model)
    M = parsed.generator(max_states=settings.max_states)
    sectors = enumerate_sectors(M, twist=parsed.sector_twist)

    def kernel_matches_sectors() -> CheckReport:
        report = CheckReport(name="kernel_dimension", cases=1)
        kernel = generator_kernel_dimension(M)
        report.notes["kernel"] = kernel
        if kernel != len(sectors):
            report.record((kernel, len(sectors)))
        return report

    checks = [
        (f"check_stationary_{s.id}", lambda s=s: check_stationary(M, stationary_state(s), cap=settings.report_cap))
        for s in sectors
    ]
    checks.append(("kernel_dimension", kernel_matches_sectors))
    return _run_checks(checks, ledger, args.format)


def cmd_branch(args, settings: Settings, ledger: CheckLedger) -> int:
    from src.quench.branching import branching_matrix, classify_relation, oscillation_chain

    f1 = _twist(args.from_twist, args.N)
    f2 = _twist(args.to_twist, args.N)
    B = branching_matrix(f1, f2, args.L, max_states=settings.max_states)
    records = [
        {"from": i, "from_label": B.rows[i].label, "to": j, "to_label": B.cols[j].label, "probability": p}
        for (i, j), p in B.entries().items()
    ]
    _emit(records, args.format)

    if args.classify:
        relation = classify_relation(f1, f2, args.L, max_states=settings.max_states)
        print(f"verdict: {relation.verdict} (reverse: {relation.reverse_verdict})")
        if relation.f1_power_of_f2 is not None:
            print(f"f1 = f2^{relation.f1_power_of_f2}")
        if relation.overlaps:
            print(f"proper overlaps: {relation.overlaps}")
        if not relation.passed:
            for v in relation.violations:
                print(f"violation: {v}")
            return EXIT_FAIL
    if args.chain is not None:
        result = oscillation_chain(f1, f2, args.L, args.chain, args.switches, max_states=settings.max_states)
        _emit([{"sector": k, "after_switches": v, "fixed_point": result.fixed_point.get(k, Fraction(0))}
               for k, v in result.distribution.items()], args.format)
        if not result.fixed_point_verified:
            return EXIT_FAIL
    return EXIT_OK if all(p == 1 for p in B.row_sums()) else EXIT_FAIL


def cmd_quench(args, settings: Settings, ledger: CheckLedger) -> int:
    from src.quench.schedule import parse_schedule, results_to_csv, run_schedule

    schedule = parse_schedule(Path(args.schedule).read_text(encoding="utf-8"))
    results = run_schedule(schedule, max_states=settings.max_states, tol=settings.tol)
    sys.stdout.write(results_to_csv(results))
    return EXIT_OK


def cmd_evolve(args, settings: Settings, ledger: CheckLedger) -> int:
    from src.dynamics.evolve import ProbabilityVector, evolve
    from src.sectors.engine import enumerate_sectors

    if args.steps < 1:
        raise PreconditionError(f"--steps must be at least 1, got {args.steps}")
    parsed = _load_model(args.model)
    M = parsed.generator(max_states=settings.max_states)
    sectors = enumerate_sectors(M, twist=parsed.sector_twist)
    P = ProbabilityVector.point_mass(parsed.N, parsed.L, args.start)

    header = ["t"] + [f"sector_{s.id}" for s in sectors]
    header += [f"site{i + 1}_value{v}" for i in range(parsed.L) for v in range(parsed.N)]
    print(",".join(header))
    dt = args.t / args.steps
    for step in range(args.steps + 1):
        if step:
            P = evolve(M, P, dt, settings.tol)
        weights = P.sector_weights(sectors)
        row = [f"{step * dt:.6g}"] + [repr(float(weights[s.id])) for s in sectors]
        row += [repr(float(x)) for x in P.site_occupation().ravel()]
        print(",".join(row))
    return EXIT_OK


def cmd_sample(args, settings: Settings, ledger: CheckLedger) -> int:
    from src.dynamics.sampling import sample_trajectories

    parsed = _load_model(args.model)
    M = parsed.generator(max_states=settings.max_states)
    trajectories = sample_trajectories(M, args.start, args.t_max, args.count, seed=settings.seed, workers=settings.workers)
    print("trajectory,time,bond,from,to")
    for traj in trajectories:
        for e in traj.events:
            source = "-".join(map(str, e.source))
            target = "-".join(map(str, e.target))
            print(f"{traj.stream},{e.time!r},{e.bond},{source},{target}")
    return EXIT_OK


def cmd_export(args, settings: Settings, ledger: CheckLedger) -> int:
    from src.harness.output import matrix_triplets

    parsed = _load_model(args.model)
    sys.stdout.write(matrix_triplets(parsed.generator(max_states=settings.max_states)))
    return EXIT_OK


def cmd_repro(args, settings: Settings, ledger: CheckLedger) -> int:
    from src.harness.output import fail_msg, header, pass_msg
    from src.harness.repro import run_repro_suite

    if args.format == "table":
        header("REPRODUCTION SUITE")
    report = run_repro_suite(settings=settings, ledger=ledger, only=args.only)
    if args.format == "table":
        for c in report.checks:
            line = f"{c.name} [{c.provenance}] {c.summary} ({c.seconds:.2f}s)"
            pass_msg(line) if c.passed else fail_msg(line)
        print(f"\n  {report.summary}")
    else:
        _emit([{
            "check": c.name,
            "provenance": c.provenance,
            "expected": c.expected,
            "computed": c.computed,
            "verdict": "pass" if c.passed else "FAIL",
            "seconds": round(c.seconds, 3),
        } for c in report.checks], args.format)
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Integrable Markov models from set-theoretical Yang-Baxter solutions",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__,
    )
    parser.add_argument("--max-states", type=int, default=None, help="Bound on N^L (default: YBM_MAX_STATES or 4096)")
    parser.add_argument("--tol", type=float, default=None, help="Float tolerance for evolve (default: 1e-12)")
    parser.add_argument("--seed", type=int, default=None, help="RNG seed for sampling (default: 0)")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads, 0 = all cores")
    parser.add_argument("--format", choices=["table", "json", "csv"], default="table", help="Output format")
    parser.add_argument("--no-ledger", action="store_true", help="Do not append to the check ledger")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="YBE, involutivity and family relations")
    p.add_argument("model")
    p.add_argument("--spectral", action="store_true", help="Also check the spectral YBE on the 4x4 grid")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("integrability", help="Transfer-matrix and conjugation checks")
    p.add_argument("model")
    p.set_defaults(handler=cmd_integrability)

    p = sub.add_parser("sectors", help="Enumerate sectors")
    p.add_argument("model")
    p.add_argument("--members", action="store_true", help="List every member encoding")
    p.set_defaults(handler=cmd_sectors)

    p = sub.add_parser("count", help="Closed-form sector counts")
    p.add_argument("--twist", required=True)
    p.add_argument("-L", type=int, required=True)
    p.add_argument("--N", type=int, default=None, help="Alphabet size when the twist text leaves it implicit")
    p.add_argument("--cardinalities", action="store_true", help="Also list the size of each profile's sectors")
    p.set_defaults(handler=cmd_count)

    p = sub.add_parser("stationary", help="Check uniform stationary states and the kernel dimension")
    p.add_argument("model")
    p.set_defaults(handler=cmd_stationary)

    p = sub.add_parser("branch", help="Branching probabilities between two twists")
    p.add_argument("--from", dest="from_twist", required=True)
    p.add_argument("--to", dest="to_twist", required=True)
    p.add_argument("-L", type=int, required=True)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--classify", action="store_true", help="Report spreading/splitting")
    p.add_argument("--chain", type=int, default=None, metavar="SECTOR", help="Run the oscillation chain from this f1-sector")
    p.add_argument("--switches", type=int, default=1)
    p.set_defaults(handler=cmd_branch)

    p = sub.add_parser("quench", help="Run a quench schedule")
    p.add_argument("--schedule", required=True)
    p.set_defaults(handler=cmd_quench)

    p = sub.add_parser("evolve", help="Master-equation evolution from a configuration")
    p.add_argument("model")
    p.add_argument("--start", type=_parse_sites, required=True)
    p.add_argument("-t", type=float, required=True)
    p.add_argument("--steps", type=int, default=10)
    p.set_defaults(handler=cmd_evolve)

    p = sub.add_parser("sample", help="Kinetic Monte Carlo event log")
    p.add_argument("model")
    p.add_argument("--start", type=_parse_sites, required=True)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--count", type=int, default=1)
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser("export", help="Generator as 'row col num/den' triplets")
    p.add_argument("model")
    p.set_defaults(handler=cmd_export)

    p = sub.add_parser("repro", help="Run every acceptance check")
    p.add_argument("--only", nargs="*", default=None, help="Restrict to these item names")
    p.set_defaults(handler=cmd_repro)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = Settings.from_env().override(
            max_states=args.max_states,
            tol=args.tol,
            seed=args.seed,
            threads=args.threads,
        )
        ledger = CheckLedger(settings.ledger_dir, enabled=not args.no_ledger)
        return args.handler(args, settings, ledger)
    except (ModelError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
