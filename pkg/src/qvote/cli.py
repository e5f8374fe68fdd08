"""``qvote`` command line.

Exit codes: 0 success, 1 a verification or assertion failed, 2 usage,
parse or resource-limit error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys

from .errors import InvalidArgument, ResourceLimit
from .runner import run_scenario, scan
from .scenario import ConfigError, load_scenario, parse_attack
from .verify import verify_lemma, verify_pvm, verify_theorem

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def fmt(p) -> str:
    return f"{p:.12g}"


def _print_config(cfg):
    for key, value in cfg.items():
        if value is not None:
            print(f"  {key}: {' '.join(value) if isinstance(value, list) else value}")


def _write_json(path, doc):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def cmd_run(args) -> int:
    config = load_scenario(args.scenario)
    if args.shots is not None:
        config = type(config)(config.n, config.event, config.attack, args.shots,
                              args.seed if args.seed is not None else 0, config.source)
    elif args.seed is not None and config.shots:
        config = type(config)(config.n, config.event, config.attack, config.shots,
                              args.seed, config.source)
    report = run_scenario(config)

    print("configuration")
    _print_config(report["config"])
    print(f"tally (k={report['k']}, l={report['l']})")
    print(f"  {'s':>3}  {'probability':>18}")
    for row in report["tally"]:
        print(f"  {row['s']:>3}  {fmt(row['probability']):>18}")
    print(f"pass probability       {fmt(report['pass_probability'])}")
    print(f"detection probability  {fmt(report['detection_probability'])}")
    print(f"  {'party':>6}  {'failure':>18}")
    for row in report["per_party"]:
        print(f"  {row['party']:>6}  {fmt(row['failure_probability']):>18}")
    mc = report.get("monte_carlo")
    if mc:
        print(f"monte-carlo (shots={mc['shots']}, seed={mc['seed']})")
        for row in mc["tally_frequencies"]:
            print(f"  s={row['s']} frequency {fmt(row['frequency'])}")
        print(f"  failure frequency {fmt(mc['failure_frequency'])}")
        for row in mc["per_party"]:
            print(f"  party {row['party']} failure frequency {fmt(row['failure_frequency'])}")
    if args.out:
        _write_json(args.out, report)
    return EXIT_OK


def cmd_scan(args) -> int:
    attack = parse_attack(args.attack)
    table = scan(attack, args.n, args.s)
    print("configuration")
    _print_config(table["config"])
    print(f"  {'#':>4}  {'event':<24} {'k':>2} {'l':>2}  {'detection':>18}")
    for row in table["rows"]:
        print(f"  {row['index']:>4}  {row['event']:<24} {row['k']:>2} {row['l']:>2}  "
              f"{fmt(row['detection_probability']):>18}")
    print(f"max detection {fmt(table['max_probability'])} at event #{table['max_index']} "
          f"[{table['max_event']}]")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "event", "k", "l", "detection_probability"])
            for row in table["rows"]:
                w.writerow([row["index"], row["event"], row["k"], row["l"],
                            fmt(row["detection_probability"])])
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite == "lemma":
        result = verify_lemma(args.n if args.n is not None else 8)
    elif args.suite == "pvm":
        result = verify_pvm(args.n if args.n is not None else 6)
    else:
        result = verify_theorem(args.n if args.n is not None else 3,
                                args.s if args.s is not None else 1,
                                args.trials, args.seed if args.seed is not None else 1)
    doc = result.to_dict()
    status = "PASS" if result.passed else "FAIL"
    extras = ", ".join(f"{k}={v}" for k, v in doc.items()
                       if k not in ("suite", "passed", "checked", "failures"))
    print(f"{status} {result.suite}: {result.checked} checks, "
          f"{len(result.failures)} failures ({extras})")
    for failure in result.failures[:20]:
        print(f"  failure: {json.dumps(failure)}")
    if args.out:
        _write_json(args.out, doc)
    return EXIT_OK if result.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qvote", description="Exact simulator of quantum anonymous voting with anonymity checks")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario file")
    run.add_argument("scenario")
    run.add_argument("--shots", type=int, help="switch to Monte-Carlo mode with N shots")
    run.add_argument("--seed", type=int)
    run.add_argument("--out", help="write the report as JSON")
    run.set_defaults(func=cmd_run)

    sc = sub.add_parser("scan", help="detection probability of every event for an attack")
    sc.add_argument("--attack", required=True,
                    help="none | single-qubit:<i> | diagonal-phases:<a,b,...> | apparatus:<file>")
    sc.add_argument("--n", type=int, required=True)
    sc.add_argument("--s", type=int, required=True)
    sc.add_argument("--out", help="write the table as CSV")
    sc.set_defaults(func=cmd_scan)

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("suite", choices=("lemma", "pvm", "theorem"))
    ver.add_argument("--n", type=int)
    ver.add_argument("--s", type=int)
    ver.add_argument("--trials", type=int, default=100)
    ver.add_argument("--seed", type=int)
    ver.add_argument("--out", help="write the result as JSON")
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"qvote: config error: {exc}", file=sys.stderr)
    except ResourceLimit as exc:
        print(f"qvote: resource limit: {exc}", file=sys.stderr)
    except InvalidArgument as exc:
        print(f"qvote: invalid argument: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
