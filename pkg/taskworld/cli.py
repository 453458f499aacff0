"""
taskworld command line.

Usage:
    python -m taskworld validate --scene scenes/t1_kitchen.json
    python -m taskworld generate --scene scenes/t1_kitchen.json --keyword "put the glass into the fridge" --out out/t1
    python -m taskworld run      --scene ... --keyword ...                    # open-loop execution
    python -m taskworld evolve   --scene ... --keyword ... --critic oracle --tau-max 5 --out out/t1
    python -m taskworld bench    --jobs 4 --out out/bench                    # bundled 12-scenario manifest
    python -m taskworld export-trace --scene ... --keyword ... --out out/traces

Exit codes: 0 ok, 1 validation, 2 io, 3 generation, 4 remote unavailable.
"""

from __future__ import annotations
import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Optional

from .config.settings import Settings, critic_endpoint, load_settings, planner_endpoint
from .core.errors import EXIT_OK, EXIT_VALIDATION, PersistIOError, SceneValidationError, TaskWorldError
from .core.tracer import init_tracing
from .evals.runner import MANIFEST_PATH, bench, load_manifest
from .evolve.critics import CRITIC_MODES, build_critic
from .evolve.log import write_log
from .graph.reachability import check_reachability
from .evolve.loop import evolve_complex
from .metrics.summary import render
from .models.evolution import EvolutionConfig
from .models.scene import SceneConfig
from .scene.faults import FAULT_HOOKS, apply_faults
from .scene.loader import load_scene
from .taskgen.pipeline import GenerationBundle, generate
from .taskgen.planners import PLANNER_MODES, build_planner
from .world.execution import ExecutionTrace, execute_flow, initial_world
from .world.trace_io import export_trace
from .world.transfer import apply_transfer

log = logging.getLogger(__name__)

LOG_LEVEL_ENV = "TASKWORLD_LOG_LEVEL"


# ─── Argument parsing ─────────────────────────────────────────────────────────

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="JSON settings file (timeouts, retries, in-flight cap)")
    p.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING (default) or ERROR")
    p.add_argument("--seed", type=int, default=0, help="Seed for the retry backoff jitter of remote clients")


def _add_task(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scene", required=True, metavar="PATH", help="Scene JSON file")
    p.add_argument("--keyword", required=True, help='Task keyword, e.g. "put the glass into the fridge"')
    p.add_argument("--planner", choices=PLANNER_MODES, default="template")
    p.add_argument(
        "--fault", action="append", default=[], metavar="NAME[=OBJECT_ID]",
        help=f"Fault hook to apply before generation; one of {', '.join(sorted(FAULT_HOOKS))}",
    )


def _add_evolution(p: argparse.ArgumentParser) -> None:
    p.add_argument("--critic", choices=CRITIC_MODES, default="oracle")
    p.add_argument("--tau-max", type=int, default=None, help="Evolution iteration budget")
    p.add_argument("--p1", type=int, default=None, help="Observation look-back window in steps")
    p.add_argument("--views", default=None, help="Comma-separated views, e.g. Global,Head,Wrist")
    p.add_argument("--raster", action="store_true", help="Attach rasterized frames to observations")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="taskworld",
        description="Task-world engine: scene validation, task generation, execution and self-evolution",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="Validate a scene file")
    p.add_argument("--scene", required=True, metavar="PATH")
    _add_common(p)

    p = sub.add_parser("generate", help="Generate BDDL, scales and initial flows for a keyword")
    _add_task(p)
    p.add_argument("--out", metavar="DIR", help="Write the bundle files here")
    _add_common(p)

    p = sub.add_parser("run", help="Execute the initial flows open-loop")
    _add_task(p)
    p.add_argument("--out", metavar="DIR", help="Write run.json here")
    _add_common(p)

    p = sub.add_parser("evolve", help="Run the self-evolution loop over every subtask")
    _add_task(p)
    _add_evolution(p)
    p.add_argument("--out", metavar="DIR", help="Write evolution logs here")
    _add_common(p)

    p = sub.add_parser("bench", help="Run a scenario manifest and summarise SR / ESR / Iter")
    p.add_argument("--manifest", default=str(MANIFEST_PATH), metavar="PATH")
    p.add_argument("--planner", choices=PLANNER_MODES, default="template")
    _add_evolution(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", metavar="DIR", help="Write episodes.jsonl, summary.json and summary.txt here")
    _add_common(p)

    p = sub.add_parser("export-trace", help="Write JSONL traces of an open-loop run")
    _add_task(p)
    p.add_argument("--out", required=True, metavar="DIR")
    _add_common(p)
    return parser


def _configure_logging(level: Optional[str]) -> None:
    name = (level or os.getenv(LOG_LEVEL_ENV) or "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, name, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _evolution_config(args: argparse.Namespace) -> EvolutionConfig:
    overrides: dict[str, Any] = {"raster": args.raster}
    if args.tau_max is not None:
        overrides["tau_max"] = args.tau_max
    if args.p1 is not None:
        overrides["p1"] = args.p1
    if args.views:
        overrides["views"] = args.views
    return EvolutionConfig(**overrides)


def _faults(specs: list[str]) -> dict[str, Any]:
    faults: dict[str, Any] = {}
    for spec in specs:
        name, _, target = spec.partition("=")
        faults[name.strip()] = target.strip() or True
    return faults


# ─── Helpers ──────────────────────────────────────────────────────────────────

def _write_json(path: Path, data: Any) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    except OSError as e:
        raise PersistIOError(f"cannot write {path}: {e}") from e


def _prefix(k: int, name: str) -> str:
    return f"{k:02d}_{name}"


def _scene(args: argparse.Namespace) -> SceneConfig:
    return apply_faults(load_scene(args.scene), _faults(args.fault))


def _bundle(args: argparse.Namespace, settings: Settings) -> tuple[SceneConfig, GenerationBundle]:
    scene = _scene(args)
    planner = build_planner(args.planner, settings.remote)
    try:
        return scene, generate(args.keyword, scene, planner)
    finally:
        planner.close()


def _open_loop(scene: SceneConfig, bundle: GenerationBundle) -> list[ExecutionTrace]:
    """Every subtask runs, even after a failed one, joined by its transfer."""
    plan = bundle.plan
    state = initial_world(scene, plan.subtasks[0], bundle.scales)
    traces = []
    for k, (task, flow) in enumerate(zip(plan.subtasks, bundle.flows)):
        if k > 0:
            state = apply_transfer(state, plan.transfers[k - 1], task.context())
        trace = execute_flow(state, flow, task)
        traces.append(trace)
        state = trace.final_state
    return traces


# ─── Commands ─────────────────────────────────────────────────────────────────

def cmd_validate(args: argparse.Namespace, settings: Settings) -> int:
    try:
        scene = load_scene(args.scene)
    except SceneValidationError as e:
        print(f"invalid scene {args.scene}:", file=sys.stderr)
        for path, msg in e.issues:
            print(f"  {path}: {msg}", file=sys.stderr)
        return EXIT_VALIDATION
    print(f"{scene.scene_id}: valid ({len(scene.objects)} objects, floor {scene.floor_extent[0]}x{scene.floor_extent[1]})")
    return EXIT_OK


def cmd_generate(args: argparse.Namespace, settings: Settings) -> int:
    scene, bundle = _bundle(args, settings)
    plan = bundle.plan
    print(plan.name)
    for k, (task, flow) in enumerate(zip(plan.subtasks, bundle.flows), start=1):
        print(f"  {k}. {task.name}: {' → '.join(a.label() for a in flow)}")
    report = check_reachability(scene, plan, bundle.flows, scales=bundle.scales)
    if report.feasible:
        print(f"  reachable (horizon {report.horizon})")
    else:
        print(f"  not reachable: {report.failing_kind} {report.failing_index} fails")

    if args.out:
        out = Path(args.out)
        _write_json(out / "task.json", plan.to_dict())
        _write_json(out / "flows.json", bundle.to_dict()["flows"])
        _write_json(out / "scales.json", dict(sorted(bundle.scales.items())))
        _write_json(out / "reachability.json", report.to_dict())
        for k, task in enumerate(plan.subtasks, start=1):
            path = out / "bddl" / f"{_prefix(k, task.name)}.bddl"
            try:
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text(bundle.bddl[task.name], encoding="utf-8")
            except OSError as e:
                raise PersistIOError(f"cannot write {path}: {e}") from e
        print(f"bundle written to {out}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace, settings: Settings) -> int:
    scene, bundle = _bundle(args, settings)
    traces = _open_loop(scene, bundle)
    report = {
        "task": bundle.plan.name,
        "success": all(t.success for t in traces),
        "subtasks": [
            {"name": t.task.name, "success": t.success, "steps": len(t.steps), "events": len(t.events)}
            for t in traces
        ],
    }
    for item in report["subtasks"]:
        print(f"  {item['name']}: {'success' if item['success'] else 'failed'} ({item['events']} events)")
    print(f"{report['task']}: {'success' if report['success'] else 'failed'}")
    if args.out:
        _write_json(Path(args.out) / "run.json", report)
    # a failing flow still completed its execution
    return EXIT_OK


def cmd_export_trace(args: argparse.Namespace, settings: Settings) -> int:
    scene, bundle = _bundle(args, settings)
    out = Path(args.out)
    for k, trace in enumerate(_open_loop(scene, bundle), start=1):
        path = export_trace(trace, out / f"{_prefix(k, trace.task.name)}.jsonl")
        print(path)
    return EXIT_OK


def cmd_evolve(args: argparse.Namespace, settings: Settings) -> int:
    cfg = _evolution_config(args)
    scene, bundle = _bundle(args, settings)
    world = initial_world(scene, bundle.plan.subtasks[0], bundle.scales)
    critic = build_critic(args.critic, settings.remote)
    try:
        evolution = evolve_complex(world, bundle.plan, bundle.flows, cfg, critic)
    finally:
        critic.close()

    for k, history in enumerate(evolution.histories, start=1):
        print(f"  {history.subtask}: {history.outcome.value} after {history.iterations_used} iterations")
        if args.out:
            write_log(history, Path(args.out) / "evolution" / f"{_prefix(k, history.subtask)}.jsonl")
    print(f"{bundle.plan.name}: {'Succeeded' if evolution.success else 'Failed'}")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, settings: Settings) -> int:
    cfg = _evolution_config(args)
    # remote modes fail fast rather than once per episode
    if args.planner == "remote":
        planner_endpoint()
    if args.critic == "remote":
        critic_endpoint()

    scenarios = load_manifest(args.manifest)
    results, table = bench(
        scenarios, cfg,
        jobs=args.jobs, planner_mode=args.planner, critic_mode=args.critic,
        settings=settings.remote, out_dir=args.out,
    )
    print(render(table), end="")
    overall = table.overall()
    complete = overall.get("Complete Task")
    errors = sum(1 for r in results if r.error)
    print(f"\n{len(results)} episodes, {errors} errored, complete-task SR {complete.sr:.1f}%")
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "generate": cmd_generate,
    "run": cmd_run,
    "evolve": cmd_evolve,
    "bench": cmd_bench,
    "export-trace": cmd_export_trace,
}


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.log_level)
    init_tracing()
    try:
        settings = load_settings(args.config)
        remote = settings.remote.model_copy(update={"jitter_seed": args.seed})
        settings = settings.model_copy(update={"remote": remote})
        return COMMANDS[args.command](args, settings)
    except TaskWorldError as e:
        log.debug("command %s failed", args.command, exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
