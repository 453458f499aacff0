"""Compositional reachability of generated bundles, and of bundles with a broken boundary or segment."""

from dataclasses import replace

import pytest

from taskworld.core.errors import EmptyConjunctionError, InvalidParamError
from taskworld.graph.reachability import check_boundary, check_reachability
from taskworld.graph.task_graph import INTER, INTRA, build_graph, embed_flow
from taskworld.models.actions import PrimitiveKind as K, make_flow
from taskworld.models.predicates import Predicate
from taskworld.scene.loader import parse_scene
from taskworld.world.execution import execute_flow, initial_world

from .conftest import FAMILIES

BOUNDARIES = [(family, k) for family, n in (("T1", 3), ("T2", 3), ("T3", 1), ("T4", 1)) for k in range(1, n + 1)]


@pytest.mark.parametrize("family", sorted(FAMILIES))
def test_generated_bundles_are_feasible(bundles, family):
    scene, bundle = bundles[family]
    report = check_reachability(scene, bundle.plan, bundle.flows, scales=bundle.scales)
    assert report.feasible
    assert report.failing_index is None
    assert all(s.success for s in report.segments)
    assert all(t.boundary_match for t in report.transfers)
    assert len(report.transfers) == len(bundle.plan.subtasks) - 1
    assert report.horizon == sum(len(f) for f in bundle.flows)


@pytest.mark.parametrize("family, boundary", BOUNDARIES)
def test_broken_boundary_is_located(bundles, family, boundary):
    scene, bundle = bundles[family]
    nxt = bundle.plan.subtasks[boundary]
    broken = bundle.plan.replace_subtask(boundary, replace(nxt, init=tuple(p.negate() for p in nxt.init)))
    report = check_reachability(scene, broken, bundle.flows, scales=bundle.scales)
    assert not report.feasible
    assert report.failing_index == boundary
    assert report.failing_kind == "transfer"
    # later segments still ran
    assert len(report.segments) == len(bundle.plan.subtasks)


def test_failed_segment_is_located(bundles):
    scene, bundle = bundles["T4"]
    flows = [bundle.flows[0], make_flow((K.LIFT_EEF_UP, 0.1))]
    report = check_reachability(scene, bundle.plan, flows, scales=bundle.scales)
    assert not report.feasible
    assert (report.failing_kind, report.failing_index) == ("segment", 2)
    assert report.to_dict()["segments"][1]["success"] is False


def test_flow_count_must_match(bundles):
    scene, bundle = bundles["T3"]
    with pytest.raises(InvalidParamError):
        check_reachability(scene, bundle.plan, bundle.flows[:1])


def test_boundary_check_on_the_post_segment_state(bundles):
    scene, bundle = bundles["T3"]
    pick, place = bundle.plan.subtasks
    state = initial_world(scene, pick, bundle.scales)
    after = execute_flow(state, bundle.flows[0], pick).final_state
    assert check_boundary(pick.goal, place.init, after)
    assert check_boundary(pick.goal, place.init, after, bundle.plan.transfers[0], place.context())
    assert not check_boundary(pick.goal, (Predicate.inside("apple_0", "bowl_0"),), after)
    with pytest.raises(EmptyConjunctionError):
        check_boundary(pick.goal, (), after)


def test_graph_embedding_uses_intra_and_inter_edges(bundles):
    scene, bundle = bundles["T3"]
    graph = build_graph(scene)
    pick, place = bundle.plan.subtasks
    a = embed_flow(graph, pick, bundle.flows[0])
    b = embed_flow(graph, place, bundle.flows[1])
    assert len(a) == len(bundle.flows[0])
    graph.add_path(1, pick, a)
    graph.add_path(2, place, b)
    graph.add_transfer(1, bundle.plan.transfers[0], a[-1], b[0])
    kinds = {r for _, _, r in graph.graph.edges(data="relation")}
    assert kinds == {INTRA, INTER}
    assert graph.is_consistent()


THREE_OBJECTS = {
    "scene_id": "three",
    "floor_extent": [4.0, 4.0],
    "rooms": ["kitchen"],
    "objects": [
        {"id": "table_0", "category": "table", "bbox": [0.8, 1.2, 0.75], "pos": [2.6, 2.0, 0.375]},
        {"id": "glass_0", "category": "glass", "bbox": [0.05, 0.05, 0.12], "pos": [2.4, 2.0, 0.81]},
        {"id": "bowl_0", "category": "bowl", "bbox": [0.2, 0.2, 0.08], "pos": [2.8, 2.0, 0.79]},
    ],
}


def test_node_space_is_objects_times_kinds_times_steps():
    scene = parse_scene(THREE_OBJECTS)
    graph = build_graph(scene, max_steps=8)
    assert graph.node_count == 3 * 21 * 8 == 504
    nodes = list(graph.nodes())
    assert len(nodes) == len(set(nodes)) == 504
    assert all(graph.has_node(n) for n in nodes)
    assert graph.graph.number_of_nodes() == 0


def test_node_space_grows_linearly_with_max_steps():
    scene = parse_scene(THREE_OBJECTS)
    counts = [build_graph(scene, max_steps=m).node_count for m in range(1, 41)]
    assert counts == [63 * m for m in range(1, 41)]
    with pytest.raises(InvalidParamError):
        build_graph(scene, max_steps=0)
