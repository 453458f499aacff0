"""
Benchmark runner.
Loads the scenario manifest, runs each episode end to end (scene → faults →
generation → self-evolution) and reduces the results into a MetricTable.
One episode's failure is recorded as a failed EpisodeResult and never aborts
the batch.
"""

from __future__ import annotations
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from ..config.settings import RemoteSettings
from ..core.errors import InvalidParamError, PersistIOError, TaskWorldError
from ..core.tracer import get_tracer
from ..evolve.critics import build_critic
from ..evolve.loop import evolve_complex
from ..metrics.store import persist
from ..metrics.summary import EpisodeResult, MetricTable, summarize
from ..models.evolution import EvolutionConfig
from ..scene.faults import apply_faults
from ..scene.loader import load_scene
from ..taskgen.pipeline import generate
from ..taskgen.planners import build_planner
from ..world.execution import initial_world

log = logging.getLogger(__name__)

MANIFEST_PATH = Path(__file__).parent / "scenarios.json"


# ─── Scenarios ────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Scenario:
    id: str
    family: str
    scene: Path                     # resolved against the manifest directory
    keyword: str
    faults: dict[str, Any] = field(default_factory=dict)


def load_manifest(path: str | Path = MANIFEST_PATH) -> list[Scenario]:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise PersistIOError(f"cannot read manifest {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise PersistIOError(f"manifest {path} is not valid JSON: {e.msg}") from e
    if not isinstance(raw, list):
        raise InvalidParamError(f"manifest {path} must be a JSON list of scenarios")

    scenarios, seen = [], set()
    for i, entry in enumerate(raw):
        try:
            sid = str(entry.get("id") or f"scenario_{i}")
            scenario = Scenario(
                id=sid,
                family=str(entry.get("family", "")),
                scene=(path.parent / entry["scene"]).resolve(),
                keyword=str(entry["keyword"]),
                faults=dict(entry.get("faults") or {}),
            )
        except (AttributeError, KeyError, TypeError) as e:
            raise InvalidParamError(f"manifest {path} entry {i} is malformed: {e}") from e
        if sid in seen:
            raise InvalidParamError(f"manifest {path} repeats scenario id {sid!r}")
        seen.add(sid)
        scenarios.append(scenario)
    return scenarios


# ─── Episodes ─────────────────────────────────────────────────────────────────

def run_episode(
    scenario: Scenario,
    cfg: EvolutionConfig | None = None,
    *,
    planner_mode: str = "template",
    critic_mode: str = "oracle",
    settings: RemoteSettings | None = None,
) -> EpisodeResult:
    """Never raises for a pipeline failure; the error is kept on the result."""
    cfg = cfg or EvolutionConfig()
    tracer = get_tracer()
    start = time.time()

    with tracer.start_as_current_span("bench.episode") as span:
        span.set_attribute("scenario.id", scenario.id)
        span.set_attribute("scenario.family", scenario.family)
        span.set_attribute("scenario.faults", ",".join(sorted(scenario.faults)))

        planner = critic = None
        try:
            scene = apply_faults(load_scene(scenario.scene), scenario.faults)
            planner = build_planner(planner_mode, settings)
            bundle = generate(scenario.keyword, scene, planner)
            world = initial_world(scene, bundle.plan.subtasks[0], bundle.scales)
            critic = build_critic(critic_mode, settings)
            evolution = evolve_complex(world, bundle.plan, bundle.flows, cfg, critic)
            result = EpisodeResult.from_evolution(scenario.id, scenario.family, evolution)
        except TaskWorldError as e:
            log.error("Episode %s failed: %s", scenario.id, e)
            span.set_attribute("episode.error", str(e))
            result = EpisodeResult.failed(scenario.id, scenario.family, str(e))
        except Exception as e:
            log.exception("Episode %s crashed", scenario.id)
            span.set_attribute("episode.error", str(e))
            result = EpisodeResult.failed(scenario.id, scenario.family, str(e))
        finally:
            for client in (planner, critic):
                if client is not None:
                    client.close()

        span.set_attribute("episode.success", result.complete_success)
        span.set_attribute("episode.iterations", result.total_iterations)

    log.info(
        "Episode %s: success=%s iterations=%d (%.2fs)",
        scenario.id, result.complete_success, result.total_iterations, time.time() - start,
    )
    return result


def _run_one(args: tuple) -> EpisodeResult:
    scenario, cfg, planner_mode, critic_mode, settings = args
    return run_episode(
        scenario, cfg, planner_mode=planner_mode, critic_mode=critic_mode, settings=settings,
    )


def bench(
    scenarios: list[Scenario],
    cfg: EvolutionConfig | None = None,
    *,
    jobs: int = 1,
    planner_mode: str = "template",
    critic_mode: str = "oracle",
    settings: RemoteSettings | None = None,
    out_dir: Optional[str | Path] = None,
) -> tuple[list[EpisodeResult], MetricTable]:
    """
    Run every scenario and summarise. Results keep manifest order whatever
    `jobs` is; with `out_dir` they are also persisted.
    """
    if jobs < 1:
        raise InvalidParamError(f"jobs must be >= 1, got {jobs}")
    cfg = cfg or EvolutionConfig()
    work = [(s, cfg, planner_mode, critic_mode, settings) for s in scenarios]
    log.info("Bench: %d scenarios, %d jobs, critic=%s", len(work), jobs, critic_mode)

    if jobs == 1 or len(work) <= 1:
        results = [_run_one(w) for w in work]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, work))

    table = persist(results, out_dir) if out_dir is not None else summarize(results)
    return results, table
