"""Command-line front end.

Batch subcommands (run/demo/check/slice/enumerate) operate on local files so
logs can be produced and audited offline, in separate processes; `serve`
starts the HTTP gateway for live approval flows. Default log output lands in
$BIP_LOG_DIR (./logs if unset).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .audit import backward_slice, check_trace_safety, read_log, _eval_to_obj
from .domain import RiskClass, RiskTable, TrustLevel
from .errors import BeliefGateError, MissingPlan, NotAnExec
from .monitor import Mode
from .simlab import (
    EnumerationParams,
    demo_mcp_github,
    enumerate_traces,
    load_scenario_file,
    run_scenario,
)

MODE_BY_NAME = {"aware": Mode.belief_aware, "blind": Mode.belief_blind}


def _log_dir() -> str:
    return os.environ.get("BIP_LOG_DIR", "./logs")


def _cmd_run(args) -> int:
    scenario = load_scenario_file(args.scenario)
    mode = MODE_BY_NAME[args.mode] if args.mode else None
    log_path = args.log or os.path.join(
        _log_dir(), f"{scenario.name}-{(mode or scenario.mode).value}.jsonl"
    )
    transcript = run_scenario(scenario, mode=mode, theta=args.theta, log_path=log_path)
    for i, outcome in enumerate(transcript.outcomes):
        print(f"step {i}: {outcome}")
    print(f"log: {log_path}")
    if transcript.failures:
        for f in transcript.failures:
            print(
                f"MISMATCH step {f['step']}: expected {f['expected']}, got {f['actual']}",
                file=sys.stderr,
            )
        return 1
    return 0


def _cmd_demo(args) -> int:
    if args.scenario != "mcp-github":
        print(f"unknown demo scenario: {args.scenario}", file=sys.stderr)
        return 1
    log_path = os.path.join(_log_dir(), f"mcp-github-{args.mode}.jsonl")
    if os.path.exists(log_path):
        os.remove(log_path)  # demo logs are regenerated, not appended
    result = demo_mcp_github(args.mode, log_path=log_path)
    label = "belief-blind baseline" if args.mode == "before" else "belief-aware"
    print(f"scenario mcp-github, mode={args.mode} ({label})")
    print(f"{'Stage':<6}{'Event':<8}{'Annotations':<58}Outcome")
    for row in result.rows:
        print(f"{row.stage:<6}{row.event:<8}{row.annotation:<58}{row.outcome}")
    print(f"log: {log_path}")
    return 0


def _risk_table_from_log_args(args) -> RiskTable:
    if args.risk_table:
        with open(args.risk_table, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        return RiskTable(
            rules=tuple((p, RiskClass[r]) for p, r in doc.get("rules", [])),
            default=RiskClass[doc.get("default", "Low")],
        )
    # default convention used by generated logs: actH*/actL* prefixes plus
    # the builtin incident action
    return RiskTable(
        rules=(("actH*", RiskClass.High), ("post_comment", RiskClass.High)),
        default=RiskClass.Low,
    )


def _cmd_check(args) -> int:
    records = read_log(args.log)
    violations = check_trace_safety(records, _risk_table_from_log_args(args))
    for v in violations:
        print(json.dumps(v.to_obj(), separators=(",", ":")))
    return 2 if violations else 0


def _cmd_slice(args) -> int:
    records = read_log(args.log)
    try:
        evals = backward_slice(records, args.exec, run_id=args.run)
    except NotAnExec as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MissingPlan as exc:
        print(json.dumps({"finding": "MISSING_PLAN", "detail": str(exc)}))
        return 2
    for te in evals:
        print(json.dumps(_eval_to_obj(te), separators=(",", ":")))
    return 0


def _cmd_enumerate(args) -> int:
    profile = (TrustLevel.Low,) * args.low_beliefs + (TrustLevel.High,) * args.high_beliefs
    risks = (RiskClass.High,) * args.high_actions + (RiskClass.Low,) * args.low_actions
    params = EnumerationParams(
        max_len=args.max_len,
        trust_profile=profile,
        action_risks=risks,
        mode=MODE_BY_NAME[args.mode],
        theta=args.theta,
        include_timeout_branch=not args.no_timeout_branch,
    )
    report = enumerate_traces(params)
    print(json.dumps(report.to_obj(), indent=2))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(timeout_ms=args.hitl_timeout_ms, log_dir=_log_dir())
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beliefgate",
        description="Belief-aware authorization monitor: run scenarios, audit logs, "
        "enumerate traces, serve the approval gateway.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="drive a scenario file through the monitor")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--mode", choices=["aware", "blind"], help="override the scenario's mode")
    p.add_argument("--log", help="output .jsonl path (default under $BIP_LOG_DIR)")
    p.add_argument("--theta", type=float, help="override the trust threshold")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("demo", help="replay the builtin incident before/after enforcement")
    p.add_argument("scenario", choices=["mcp-github"])
    p.add_argument("--mode", choices=["before", "after"], required=True)
    p.set_defaults(func=_cmd_demo)

    p = sub.add_parser("check", help="check a log for trace-safety violations (exit 2 if any)")
    p.add_argument("--log", required=True)
    p.add_argument("--risk-table", help="risk table JSON ({rules: [[pattern, class]..], default})")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("slice", help="backward-slice an exec record to its cited beliefs")
    p.add_argument("--log", required=True)
    p.add_argument("--exec", type=int, required=True, help="seq of the exec record")
    p.add_argument("--run", help="run id, when the log interleaves several runs")
    p.set_defaults(func=_cmd_slice)

    p = sub.add_parser("enumerate", help="exhaustively check all traces up to a length bound")
    p.add_argument("--max-len", type=int, required=True)
    p.add_argument("--low-beliefs", type=int, default=1)
    p.add_argument("--high-beliefs", type=int, default=0)
    p.add_argument("--high-actions", type=int, default=1)
    p.add_argument("--low-actions", type=int, default=0)
    p.add_argument("--mode", choices=["aware", "blind"], default="aware")
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--no-timeout-branch", action="store_true")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("serve", help="start the HITL approval gateway")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--hitl-timeout-ms", type=int, default=30_000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BeliefGateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
