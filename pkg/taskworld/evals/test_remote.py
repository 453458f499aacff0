"""
Remote planner and critic clients against in-process httpx mock servers.
The fake planner answers with the template planner's own output, so a remote
run must reproduce the template bundle exactly.
"""

import json

import httpx
import pytest

from taskworld.config.settings import CRITIC_URL_ENV, PLANNER_TOKEN_ENV, PLANNER_URL_ENV, RemoteSettings
from taskworld.core.errors import (
    EXIT_GENERATION,
    EXIT_REMOTE,
    ConfigError,
    CriticUnavailableError,
    InvalidDecompositionError,
    ParamShapeMismatchError,
    PlannerUnavailableError,
    RepeatedProposalError,
)
from taskworld.evolve.codec import decode_flow, encode_flow
from taskworld.evolve.critics import RemoteCritic, build_critic
from taskworld.evolve.critics.remote import flags_from_text
from taskworld.evolve.loop import evolve_subtask
from taskworld.models.evolution import CritiqueFlag, EvolutionConfig, EvolutionHistory
from taskworld.models.planning import ExpandResponse
from taskworld.models.tasks import TaskKeyword
from taskworld.observe.frames import capture
from taskworld.taskgen.pipeline import generate
from taskworld.taskgen.planners import RemotePlanner, TemplatePlanner
from taskworld.world.execution import execute_flow, initial_world

from .conftest import FAMILIES, make_bundle

FAST = RemoteSettings(backoff_seconds=0.0, max_retries=2)


@pytest.fixture
def planner_env(monkeypatch):
    monkeypatch.setenv(PLANNER_URL_ENV, "http://planner.test/v1/plan")
    monkeypatch.setenv(PLANNER_TOKEN_ENV, "secret")


@pytest.fixture
def critic_env(monkeypatch):
    monkeypatch.setenv(CRITIC_URL_ENV, "http://critic.test/v1/critique")


def _template_server(scene, seen: list):
    """Answers planner requests the way the template planner would."""
    template = TemplatePlanner()

    def handler(request: httpx.Request) -> httpx.Response:
        body = json.loads(request.content)
        seen.append((request, body))
        keyword = TaskKeyword(body["keyword"], body["scene"]["scene_id"])
        if body["stage"] == "expand":
            out = template.expand(keyword, scene)
        else:
            out = template.decompose(ExpandResponse.model_validate(body["prior"]), keyword, scene)
        return httpx.Response(200, json=out.model_dump(mode="json"))

    return handler


# ─── Planner ──────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("family", sorted(FAMILIES))
def test_remote_planner_reproduces_the_template_bundle(planner_env, family):
    name, keyword = FAMILIES[family]
    scene, expected = make_bundle(name, keyword)
    seen = []
    planner = RemotePlanner(FAST, transport=httpx.MockTransport(_template_server(scene, seen)))
    bundle = generate(keyword, scene, planner)

    assert bundle.plan == expected.plan
    assert bundle.flows == expected.flows
    assert bundle.scales == expected.scales

    (r1, expand_body), (r2, decompose_body) = seen
    assert r1.headers["Authorization"] == "Bearer secret"
    assert expand_body["stage"] == "expand"
    assert expand_body["prior"] is None
    assert {o["id"] for o in expand_body["scene"]["objects"]} == set(scene.object_ids)
    assert all("class" in o for o in expand_body["scene"]["objects"])
    assert decompose_body["stage"] == "decompose"
    assert decompose_body["prior"]["task_activity_name"] == expected.plan.name


def test_unknown_object_in_a_decomposition_is_rejected(planner_env):
    scene, _ = make_bundle(*FAMILIES["T3"])
    template = _template_server(scene, [])

    def handler(request):
        body = json.loads(request.content)
        if body["stage"] == "decompose":
            return httpx.Response(200, json={"subtasks": [{
                "name": "pick_up_banana", "description": "pick up the banana",
                "target_id": "banana_0", "support_init_id": "cabinet_0", "bddl_category": "pick_up",
            }]})
        return template(request)

    planner = RemotePlanner(FAST, transport=httpx.MockTransport(handler))
    with pytest.raises(InvalidDecompositionError) as exc:
        generate(FAMILIES["T3"][1], scene, planner)
    assert exc.value.stage == "decompose"
    assert exc.value.exit_code == EXIT_GENERATION
    assert "banana_0" in str(exc.value)


def test_malformed_expansion_is_rejected(planner_env):
    scene, _ = make_bundle(*FAMILIES["T4"])
    handler = lambda request: httpx.Response(200, json={"task_activity_name": "  "})  # noqa: E731
    planner = RemotePlanner(FAST, transport=httpx.MockTransport(handler))
    with pytest.raises(InvalidDecompositionError) as exc:
        generate(FAMILIES["T4"][1], scene, planner)
    assert exc.value.stage == "expand"


def test_server_errors_are_retried(planner_env):
    scene, _ = make_bundle(*FAMILIES["T4"])
    seen = []
    template = _template_server(scene, seen)
    calls = []

    def flaky(request):
        calls.append(request)
        if len(calls) == 1:
            return httpx.Response(503)
        return template(request)

    planner = RemotePlanner(FAST, transport=httpx.MockTransport(flaky))
    out = planner.expand(TaskKeyword(FAMILIES["T4"][1], scene.scene_id), scene)
    assert out.task_activity_name == "put_the_glass_on_the_table"
    assert len(calls) == 2


def test_planner_unavailable_after_retries(planner_env):
    scene, _ = make_bundle(*FAMILIES["T4"])
    calls = []

    def down(request):
        calls.append(request)
        return httpx.Response(503)

    planner = RemotePlanner(RemoteSettings(max_retries=0, backoff_seconds=0.0), transport=httpx.MockTransport(down))
    with pytest.raises(PlannerUnavailableError) as exc:
        planner.expand(TaskKeyword(FAMILIES["T4"][1], scene.scene_id), scene)
    assert exc.value.exit_code == EXIT_REMOTE
    assert len(calls) == 1


@pytest.mark.parametrize("status", [400, 401, 403, 404])
def test_client_errors_are_not_retried(planner_env, status):
    scene, _ = make_bundle(*FAMILIES["T4"])
    calls = []

    def refuse(request):
        calls.append(request)
        return httpx.Response(status)

    planner = RemotePlanner(FAST, transport=httpx.MockTransport(refuse))
    with pytest.raises(PlannerUnavailableError, match=f"HTTP {status}"):
        planner.expand(TaskKeyword(FAMILIES["T4"][1], scene.scene_id), scene)
    assert len(calls) == 1


def test_seeded_backoff_jitter_is_reproducible(planner_env, monkeypatch):
    scene, _ = make_bundle(*FAMILIES["T4"])
    sleeps = []
    monkeypatch.setattr("taskworld.core.http_client.time.sleep", sleeps.append)
    settings = RemoteSettings(backoff_seconds=0.3, max_retries=2, jitter_seed=3)
    keyword = TaskKeyword(FAMILIES["T4"][1], scene.scene_id)
    for _ in range(2):
        planner = RemotePlanner(settings, transport=httpx.MockTransport(lambda r: httpx.Response(503)))
        with pytest.raises(PlannerUnavailableError):
            planner.expand(keyword, scene)
    assert len(sleeps) == 4
    assert sleeps[:2] == sleeps[2:]
    assert 0.3 <= sleeps[0] <= 0.4
    assert 0.6 <= sleeps[1] <= 0.7


def test_non_object_body_is_not_trusted(planner_env):
    scene, _ = make_bundle(*FAMILIES["T4"])
    planner = RemotePlanner(FAST, transport=httpx.MockTransport(lambda r: httpx.Response(200, json=[1, 2])))
    with pytest.raises(PlannerUnavailableError):
        planner.expand(TaskKeyword(FAMILIES["T4"][1], scene.scene_id), scene)


def test_remote_modes_need_an_endpoint(monkeypatch):
    monkeypatch.delenv(PLANNER_URL_ENV, raising=False)
    monkeypatch.delenv(CRITIC_URL_ENV, raising=False)
    with pytest.raises(ConfigError) as exc:
        RemotePlanner()
    assert exc.value.exit_code == EXIT_REMOTE
    with pytest.raises(ConfigError):
        build_critic("remote")


# ─── Critic ───────────────────────────────────────────────────────────────────

@pytest.fixture(scope="module")
def welded_pick():
    scene, bundle = make_bundle("t4_kitchen", "put the cup on the table", {"welded_target": True})
    task = bundle.plan.subtasks[0]
    world = initial_world(scene, task, bundle.scales)
    return world, task, bundle.flows[0], execute_flow(world, bundle.flows[0], task)


def _inspector(seen: list, explicit_flags: bool = False):
    def handler(request):
        body = json.loads(request.content)
        seen.append(body)
        if body["role"] == "supervisor":
            return httpx.Response(200, json={"reason": " Go lower. ", "new_sequence": [17, 1, 2, 3, {"9": 0.1}]})
        j = body["observations"][-1]["step"]
        key = f"Step {j - 1} observation (2 frames)"
        text = "The gripper bumps the cabinet edge." if j == 1 else "No visible change in the scene."
        out = {"observations": {key: text}}
        if explicit_flags and j == 2:
            out["flags"] = {key: ["GraspEmpty", "Ok"]}
        return httpx.Response(200, json=out)

    return handler


def test_inspector_is_asked_once_per_step(critic_env, welded_pick):
    _, _, flow, trace = welded_pick
    cfg = EvolutionConfig(p1=1)
    seen = []
    critic = RemoteCritic(FAST, transport=httpx.MockTransport(_inspector(seen)))
    critiques = critic.inspect(trace, capture(trace, cfg), cfg)

    assert [c.step_index for c in critiques] == list(range(1, len(flow) + 1))
    assert critiques[0].flags == {CritiqueFlag.COLLISION}
    assert all(c.flags == {CritiqueFlag.NO_PROGRESS} for c in critiques[1:])
    assert [[o["step"] for o in body["observations"]] for body in seen] == \
        [[1]] + [[j - 1, j] for j in range(2, len(flow) + 1)]
    assert set(seen[0]["observations"][0]["views"]) == {"Global", "Head"}
    assert seen[2]["actions"] == encode_flow(flow[:3])
    assert seen[0]["task"]["task_activity_name"] == trace.task.name


def test_explicit_flags_override_the_text(critic_env, welded_pick):
    _, _, _, trace = welded_pick
    cfg = EvolutionConfig()
    critic = RemoteCritic(FAST, transport=httpx.MockTransport(_inspector([], explicit_flags=True)))
    critiques = critic.inspect(trace, capture(trace, cfg), cfg)
    assert critiques[1].flags == {CritiqueFlag.GRASP_EMPTY}


def test_inspector_without_a_matching_key(critic_env, welded_pick):
    _, _, _, trace = welded_pick
    cfg = EvolutionConfig()
    handler = lambda r: httpx.Response(200, json={"observations": {"a": "x", "b": "y"}})  # noqa: E731
    critic = RemoteCritic(FAST, transport=httpx.MockTransport(handler))
    with pytest.raises(CriticUnavailableError):
        critic.inspect(trace, capture(trace, cfg), cfg)


def test_supervisor_response_is_decoded(critic_env, welded_pick):
    _, task, _, trace = welded_pick
    seen = []
    critic = RemoteCritic(FAST, transport=httpx.MockTransport(_inspector(seen)))
    flow, reason = critic.supervise(trace, [], task, EvolutionHistory(task.name, tau_max=5))
    assert flow == decode_flow([17, 1, 2, 3, {"9": 0.1}])
    assert reason == "Go lower."
    assert seen[0]["role"] == "supervisor"
    assert seen[0]["actions"] == encode_flow(trace.flow)


def test_repeated_remote_proposal_stops_the_loop(critic_env, welded_pick):
    world, task, flow, _ = welded_pick

    def handler(request):
        body = json.loads(request.content)
        if body["role"] == "supervisor":
            return httpx.Response(200, json={"reason": "same again", "new_sequence": encode_flow(flow)})
        j = body["observations"][-1]["step"]
        return httpx.Response(200, json={"observations": {f"Step {j - 1} observation": "no progress"}})

    critic = RemoteCritic(FAST, transport=httpx.MockTransport(handler))
    with pytest.raises(RepeatedProposalError):
        evolve_subtask(world, task, flow, EvolutionConfig(), critic)


def test_non_finite_supervisor_parameters_are_a_shape_mismatch(critic_env, welded_pick):
    world, task, flow, _ = welded_pick

    def handler(request):
        body = json.loads(request.content)
        if body["role"] == "supervisor":
            text = '{"reason": "go far", "new_sequence": [17, {"13": Infinity}, 5]}'
            return httpx.Response(200, content=text.encode(), headers={"Content-Type": "application/json"})
        j = body["observations"][-1]["step"]
        return httpx.Response(200, json={"observations": {f"Step {j - 1} observation": "no progress"}})

    critic = RemoteCritic(FAST, transport=httpx.MockTransport(handler))
    with pytest.raises(ParamShapeMismatchError):
        evolve_subtask(world, task, flow, EvolutionConfig(), critic)


@pytest.mark.parametrize("text, flags", [
    ("The door swings shut against the arm.", {CritiqueFlag.COLLISION, CritiqueFlag.DOOR_DISTURBED}),
    ("The gripper is grasping air.", {CritiqueFlag.GRASP_EMPTY}),
    ("The glass does not come to rest on the table.", {CritiqueFlag.NOT_PLACED}),
    ("The robot moves toward the counter.", {CritiqueFlag.OK}),
])
def test_flags_from_text(text, flags):
    assert flags_from_text(text) == flags
