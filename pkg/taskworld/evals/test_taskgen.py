"""Task generation: names, initial flows, BDDL documents, scales and stage-tagged failures."""

import pytest

from taskworld.core.errors import (
    BddlParseError,
    InvalidDecompositionError,
    NoTemplateError,
    UnresolvedObjectError,
)
from taskworld.models.actions import PrimitiveKind as K, make_flow
from taskworld.models.predicates import Predicate
from taskworld.models.tasks import SimpleTask
from taskworld.taskgen.bddl import emit_bddl, parse_bddl
from taskworld.taskgen.flows import goal_shape
from taskworld.taskgen.pipeline import generate
from taskworld.taskgen.planners import TemplatePlanner

PICK_FIRST = make_flow(K.APPROACH, K.CONVERGE, K.GRASP, (K.LIFT_EEF_UP, 0.2))
PLACE_IN_FRIDGE = make_flow(K.NAVIGATE_TO_SUPPORT, (K.MOVE_BASE_FORWARD, 0.4), (K.MOVE_EEF_FORWARD, 0.1), K.UNGRASP)
PLACE_DOWN = make_flow(
    K.NAVIGATE_TO_SUPPORT, (K.MOVE_BASE_FORWARD, 0.4), (K.MOVE_EEF_FORWARD, 0.1), (K.LIFT_EEF_DOWN, 0.3), K.UNGRASP,
)

INITIAL_FLOWS = {
    "T1": [
        make_flow(K.APPROACH, K.CONVERGE, K.GRASP, K.ARTICULATE_OPEN, K.UNGRASP),
        make_flow(K.NAVIGATE_TO_TARGET, K.APPROACH, K.CONVERGE, K.GRASP, (K.LIFT_EEF_UP, 0.2)),
        PLACE_IN_FRIDGE,
        make_flow(K.NAVIGATE_TO_TARGET, K.APPROACH, K.CONVERGE, K.GRASP, (K.ARTICULATE_CLOSE, (0.0, 0.5)), K.UNGRASP),
    ],
    "T2": [
        make_flow(K.APPROACH, K.CONVERGE, K.GRASP, (K.ARTICULATE_OPEN, (0.0, 0.7)), K.UNGRASP, K.RETREAT),
        make_flow(K.NAVIGATE_TO_TARGET, K.RETREAT, K.APPROACH, K.CONVERGE, K.GRASP, (K.LIFT_EEF_UP, 0.2)),
        PLACE_IN_FRIDGE,
        make_flow(K.NAVIGATE_TO_TARGET, K.APPROACH, K.CONVERGE, K.GRASP, (K.ARTICULATE_CLOSE, (0.0, 0.7)), K.UNGRASP),
    ],
    "T3": [PICK_FIRST, PLACE_DOWN],
    "T4": [PICK_FIRST, PLACE_DOWN],
}

# (init, goal) per subtask
STATES = {
    "T1": [
        ("(not (open refrigerator_0))", "(open refrigerator_0)"),
        ("(ontop glass_0 table_0)", "(not (ontop glass_0 table_0))"),
        ("(inside glass_0 gripper)", "(inside glass_0 refrigerator_0)"),
        ("(open refrigerator_0)", "(not (open refrigerator_0))"),
    ],
    "T2": [
        ("(not (open refrigerator_0))", "(open refrigerator_0)"),
        ("(ontop apple_0 table_0)", "(not (ontop apple_0 table_0))"),
        ("(inside apple_0 gripper)", "(inside apple_0 refrigerator_0)"),
        ("(open refrigerator_0)", "(not (open refrigerator_0))"),
    ],
    "T3": [
        ("(ontop apple_0 cabinet_0)", "(not (ontop apple_0 cabinet_0))"),
        ("(inside apple_0 gripper)", "(inside apple_0 bowl_0)"),
    ],
    "T4": [
        ("(ontop glass_0 cabinet_0)", "(not (ontop glass_0 cabinet_0))"),
        ("(inside glass_0 gripper)", "(ontop glass_0 table_0)"),
    ],
}

SCALES = {
    "T1": {"refrigerator_0": 1.0, "glass_0": 0.37},
    "T2": {"refrigerator_0": 1.0, "apple_0": 0.35},
    "T3": {"apple_0": 0.42},
    "T4": {"glass_0": 0.4},
}


# ─── Names ────────────────────────────────────────────────────────────────────

def test_task_and_subtask_names(bundles):
    _, t1 = bundles["T1"]
    assert t1.plan.name == "open_the_refrigerator_and_put_the_glass_into_the_refrigerator"
    assert [t.name for t in t1.plan.subtasks] == [
        "open_refrigerator", "pick_up_glass", "put_glass_into_refrigerator", "close_refrigerator",
    ]
    assert bundles["T3"][1].plan.name == "pick_up_apple_and_put_into_bowl"
    assert bundles["T4"][1].plan.name == "put_the_glass_on_the_table"
    assert [t.name for t in bundles["T4"][1].plan.subtasks] == ["pick_up_glass", "put_glass_on_table"]


def test_detail_message_names_ids(bundles):
    _, t1 = bundles["T1"]
    assert "refrigerator_0" in t1.plan.detail
    assert "glass_0" in t1.plan.detail


def test_transfers_carry_boundary_actions(bundles):
    _, t1 = bundles["T1"]
    assert len(t1.plan.transfers) == 3
    first = t1.plan.transfers[0]
    assert (first.prev_target, first.next_target) == ("refrigerator_0", "glass_0")
    assert first.end_action == K.UNGRASP
    assert first.start_action == K.NAVIGATE_TO_TARGET


# ─── Initial flows ────────────────────────────────────────────────────────────

@pytest.mark.parametrize("family", sorted(INITIAL_FLOWS))
def test_initial_flows_match_reference_rows(bundles, family):
    _, bundle = bundles[family]
    assert [tuple(f) for f in bundle.flows] == INITIAL_FLOWS[family]


def test_flow_labels_read_like_the_reference_rows(bundles):
    _, bundle = bundles["T2"]
    assert [a.label() for a in bundle.flows[0]] == [
        "APPROACH", "CONVERGE", "GRASP", "ARTICULATE_OPEN(0.0, 0.7)", "UNGRASP", "RETREAT",
    ]


def test_goal_without_template_raises(bundles):
    scene, _ = bundles["T1"]
    odd = SimpleTask(
        name="wander", description="", target="glass_0",
        init=(Predicate.inroom("glass_0", "kitchen"),), goal=(Predicate.inroom("glass_0", "kitchen"),),
    )
    with pytest.raises(NoTemplateError):
        goal_shape(odd, scene)


# ─── BDDL ─────────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("family", sorted(STATES))
def test_bddl_matches_reference_states(bundles, family):
    _, bundle = bundles[family]
    rows = []
    for task in bundle.plan.subtasks:
        init, goal = parse_bddl(bundle.bddl[task.name])
        assert len(init) == len(goal) == 1
        rows.append((init[0].to_bddl(), goal[0].to_bddl()))
    assert rows == STATES[family]


@pytest.mark.parametrize("family", sorted(STATES))
def test_parse_inverts_emit(bundles, family):
    _, bundle = bundles[family]
    for task in bundle.plan.subtasks:
        assert parse_bddl(emit_bddl(task)) == (task.init, task.goal)


def test_emitted_document_has_problem_header(bundles):
    _, bundle = bundles["T3"]
    text = bundle.bddl["pick_up_apple"]
    assert text.startswith("(define (problem pick_up_apple)")
    assert "(:domain taskworld)" in text
    assert "apple_0 cabinet_0 - object" in text


def test_parser_accepts_bare_sections_and_comments():
    init, goal = parse_bddl(
        "; hand-written\n(:init (ontop apple_0 table_0))\n(:goal (and (not (ontop apple_0 table_0))))"
    )
    assert init == (Predicate.ontop("apple_0", "table_0"),)
    assert goal == (Predicate.ontop("apple_0", "table_0").negate(),)


@pytest.mark.parametrize("text", [
    "(:init (ontop apple_0 table_0))",
    "(:init (ontop apple_0 table_0)) (:goal (and (ontop apple_0)))",
    "(:init (ontop apple_0 table_0) (:goal (and (open fridge_0)))",
    "(:init) (:goal (and (open fridge_0)))",
])
def test_malformed_bddl_is_rejected(text):
    with pytest.raises(BddlParseError):
        parse_bddl(text)


# ─── Scales ───────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("family", sorted(SCALES))
def test_target_scales(bundles, family):
    _, bundle = bundles[family]
    assert bundle.scales == SCALES[family]


# ─── Pipeline ─────────────────────────────────────────────────────────────────

def test_generation_is_deterministic(bundle_factory):
    _, a = bundle_factory("t1_kitchen", "put the glass into the fridge")
    _, b = bundle_factory("t1_kitchen", "put the glass into the fridge")
    assert a.to_dict() == b.to_dict()
    assert a.bddl == b.bddl


def test_open_fridge_with_door_already_open_skips_opening(scene_loader):
    scene = scene_loader("t1_kitchen")
    fridge = scene.get("refrigerator_0")
    opened = fridge.model_copy(update={"articulation": fridge.articulation.model_copy(update={"fraction": 1.0})})
    scene = scene.model_copy(update={"objects": [opened if o.id == "refrigerator_0" else o for o in scene.objects]})
    bundle = generate("put the glass into the fridge", scene, TemplatePlanner())
    assert bundle.plan.name == "put_the_glass_into_the_refrigerator"
    assert [t.name for t in bundle.plan.subtasks] == ["pick_up_glass", "put_glass_into_refrigerator"]


@pytest.mark.parametrize("keyword, error, stage", [
    ("juggle the plates", NoTemplateError, "expand"),
    ("put the banana into the fridge", UnresolvedObjectError, "expand"),
    ("put the glass into the oven", InvalidDecompositionError, "expand"),
    ("open the table", InvalidDecompositionError, "expand"),
    ("put the table into the fridge", InvalidDecompositionError, "expand"),
])
def test_generation_failures_carry_their_stage(scene_loader, keyword, error, stage):
    with pytest.raises(error) as exc:
        generate(keyword, scene_loader("t1_kitchen"), TemplatePlanner())
    assert exc.value.stage == stage
    assert str(exc.value).startswith(f"[{stage}]")
