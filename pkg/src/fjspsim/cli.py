"""Command line: ``fjspsim {pdr,train,eval,validate,gantt}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from .benchmarks import find_instance_files
from .dispatch import JOB_RULES, MACHINE_RULES, JobRule, MachineRule, encode_action
from .env import rollout
from .gantt import gantt_data
from .instance import ParseError, load_instance
from .ppo import TrainConfig, greedy_rollout, load_checkpoint, save_checkpoint, train
from .report import PDR_COLUMNS, make_report, pdr_rows, pdr_sweep, render_rows
from .schedule import FormatError, load_schedule
from .validate import validate_schedule

log = logging.getLogger("fjspsim")


def _rules(text: str, enum):
    names = [t.strip().lower() for t in text.split(",") if t.strip()]
    try:
        return [enum(n) for n in names]
    except ValueError:
        valid = ", ".join(e.value for e in enum)
        raise argparse.ArgumentTypeError(f"unknown rule in {text!r}; choose from {valid}")


def _write(text: str, out: Path | None, name: str):
    if out is None:
        sys.stdout.write(text)
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)
    log.info("wrote %s", out / name)


def _single_instance(arg: str):
    files = find_instance_files(arg)
    if len(files) != 1:
        raise SystemExit(f"expected one instance file, {arg} holds {len(files)}")
    return load_instance(files[0])


def cmd_pdr(args) -> int:
    paths = []
    for p in args.instances:
        paths += find_instance_files(p)
    t0 = time.perf_counter()
    results = pdr_sweep(paths, args.job_rules, args.machine_rules, args.workers)
    status = 0
    for r in results:
        if r.error:
            print(f"error: {r.error}", file=sys.stderr)
            status = 1
        for v in r.violations:
            print(f"invalid: {v}", file=sys.stderr)
            status = 1
    out = Path(args.out) if args.out else None
    _write(render_rows(pdr_rows(results), PDR_COLUMNS, args.format), out, f"pdr.{args.format}")
    if out is not None:
        sched_dir = out / "schedules"
        sched_dir.mkdir(parents=True, exist_ok=True)
        for r in results:
            for (jr, mr), sched in r.schedules.items():
                sched.save(sched_dir / f"{r.instance}_{jr}_{mr}.{args.format}")
    log.info("%d instances in %.2fs", len(results), time.perf_counter() - t0)
    return status


def cmd_train(args) -> int:
    inst = _single_instance(args.instances)
    out = Path(args.out or f"runs/{inst.name}_seed{args.seed}")
    out.mkdir(parents=True, exist_ok=True)
    cfg = TrainConfig(max_episodes=args.max_iters, time_limit=args.time_limit,
                      dump_dir=str(out))
    t = time.perf_counter()
    res = train(inst, cfg, seed=args.seed)
    seconds = time.perf_counter() - t
    ext = "json" if args.format == "json" else "csv"
    save_checkpoint(res.agent, out / "model.ckpt",
                    meta={"instance": inst.name, "seed": args.seed, "iterations": len(res.log)})
    (out / "convergence.csv").write_text(res.log_csv())
    res.best_schedule.save(out / f"best_schedule.{ext}")
    greedy = greedy_rollout(res.agent, inst)
    greedy.save(out / f"greedy_schedule.{ext}")
    status = 0
    for sched in (res.best_schedule, greedy):
        verdict = validate_schedule(sched, inst)
        if not verdict.ok:
            print(verdict, file=sys.stderr)
            status = 1
    report = make_report(inst, greedy, "ppo-greedy", seconds, args.seed).as_dict()
    report["best_makespan"] = res.best_schedule.makespan
    report["iterations"] = len(res.log)
    report["stop_reason"] = res.stop_reason
    print(json.dumps(report))
    return status


def cmd_eval(args) -> int:
    inst = _single_instance(args.instances)
    t = time.perf_counter()
    if args.checkpoint:
        agent = load_checkpoint(args.checkpoint)
        sched, method = greedy_rollout(agent, inst), "ppo-greedy"
    else:
        code = encode_action(args.job_rules[0], args.machine_rules[0])
        sched, _ = rollout(inst, code)
        method = f"{args.job_rules[0].value}/{args.machine_rules[0].value}"
    seconds = time.perf_counter() - t
    verdict = validate_schedule(sched, inst)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        sched.save(out / f"{inst.name}_schedule.{'json' if args.format == 'json' else 'csv'}")
    print(json.dumps(make_report(inst, sched, method, seconds, args.seed).as_dict()))
    if not verdict.ok:
        print(verdict, file=sys.stderr)
        return 1
    return 0


def cmd_validate(args) -> int:
    inst = _single_instance(args.instances)
    try:
        sched, claimed = load_schedule(args.schedule)
    except FormatError as e:
        print(f"format error: {e}", file=sys.stderr)
        return 2
    verdict = validate_schedule(sched, inst, claimed)
    print(verdict)
    return 0 if verdict.ok else 1


def cmd_gantt(args) -> int:
    try:
        sched, _ = load_schedule(args.schedule)
    except FormatError as e:
        print(f"format error: {e}", file=sys.stderr)
        return 2
    sched.instance = sched.instance or Path(args.schedule).stem
    machines = _single_instance(args.instances).num_machines if args.instances else None
    text = json.dumps(gantt_data(sched, machines), indent=1) + "\n"
    _write(text, Path(args.out) if args.out else None, "gantt.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fjspsim", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, instances_required=True, many=False):
        if many:
            p.add_argument("--instances", nargs="+", required=True,
                           help="instance files or directories")
        else:
            p.add_argument("--instances", required=instances_required, help="instance file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="output directory (default: stdout / runs/)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    def rules(p, job_default, machine_default):
        p.add_argument("--job-rules", type=lambda s: _rules(s, JobRule), default=job_default,
                       help="comma list of " + ",".join(r.value for r in JOB_RULES))
        p.add_argument("--machine-rules", type=lambda s: _rules(s, MachineRule),
                       default=machine_default,
                       help="comma list of " + ",".join(r.value for r in MACHINE_RULES))

    p = sub.add_parser("pdr", help="dispatching-rule sweep")
    common(p, many=True)
    rules(p, list(JOB_RULES), [MachineRule.SPT])
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_pdr)

    p = sub.add_parser("train", help="train a PPO policy on one instance")
    common(p)
    p.add_argument("--max-iters", type=int, default=8000)
    p.add_argument("--time-limit", type=float, default=3600.0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="greedy rollout of a checkpoint, or a fixed rule pair")
    common(p)
    p.add_argument("--checkpoint")
    rules(p, [JobRule.SPT], [MachineRule.SPT])
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("validate", help="check a schedule file against an instance")
    p.add_argument("schedule")
    p.add_argument("--instances", required=True, help="instance file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gantt", help="per-machine lanes and vacancy as JSON")
    p.add_argument("schedule")
    p.add_argument("--instances", help="instance file (to include idle machines)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gantt)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
