"""Scene loading, validation, serialization, graspability scaling and fault hooks."""

import json
from pathlib import Path

import numpy as np
import pytest

from taskworld.config import defaults
from taskworld.core.errors import (
    EXIT_IO,
    EXIT_VALIDATION,
    InvalidParamError,
    SceneParseError,
    SceneValidationError,
    UnknownCategoryError,
    UnknownObjectError,
)
from taskworld.models.scene import ObjectClass, ObjectSpec
from taskworld.scene.classify import classify_object
from taskworld.scene.faults import apply_faults
from taskworld.scene.loader import load_scene, parse_scene, serialize_scene
from taskworld.scene.scaling import adjust_object_scale, first_occurrence_scales

from .conftest import SCENES_DIR


def _doc(**overrides) -> dict:
    doc = {
        "scene_id": "tiny",
        "floor_extent": [4.0, 4.0],
        "rooms": ["kitchen"],
        "objects": [
            {"id": "table_0", "category": "table", "bbox": [0.8, 1.2, 0.75], "pos": [2.6, 2.0, 0.375], "room": "kitchen"},
            {"id": "glass_0", "category": "glass", "bbox": [0.135, 0.135, 0.3], "pos": [2.4, 2.0, 0.9], "room": "kitchen"},
        ],
    }
    doc.update(overrides)
    return doc


def _item(d_min: float, category: str = "glass") -> ObjectSpec:
    return ObjectSpec(id="item_0", category=category, bbox=(d_min, d_min + 0.1, 0.2), pos=(1.0, 1.0, 0.1))


# ─── Loading ──────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("path", sorted(SCENES_DIR.glob("*.json")), ids=lambda p: p.stem)
def test_bundled_scenes_load_and_round_trip(path: Path):
    scene = load_scene(path)
    assert scene.scene_id == path.stem
    assert parse_scene(serialize_scene(scene)) == scene
    assert parse_scene(json.loads(json.dumps(serialize_scene(scene)))) == scene


def test_ids_and_categories_are_lowercased():
    doc = _doc()
    doc["objects"][1] |= {"id": "Glass_0", "category": "  Glass "}
    scene = parse_scene(doc)
    assert scene.has("glass_0")
    assert scene.get("glass_0").category == "glass"


def test_duplicate_id_reports_its_field_path():
    doc = _doc()
    doc["objects"].append(dict(doc["objects"][1]))
    with pytest.raises(SceneValidationError) as exc:
        parse_scene(doc)
    assert exc.value.field_path == "objects[2].id"
    assert exc.value.exit_code == EXIT_VALIDATION


def test_every_issue_is_reported():
    doc = _doc()
    doc["objects"].append(dict(doc["objects"][1]))
    doc["objects"][0]["pos"] = [3.9, 2.0, 0.375]
    with pytest.raises(SceneValidationError) as exc:
        parse_scene(doc)
    paths = [p for p, _ in exc.value.issues]
    assert "objects[0].pos" in paths
    assert "objects[2].id" in paths


def test_schema_and_cross_object_issues_are_reported_together():
    doc = _doc()
    doc["objects"].append(dict(doc["objects"][1]))
    doc["objects"][0]["bbox"] = [0.8, -1.2, 0.75]
    with pytest.raises(SceneValidationError) as exc:
        parse_scene(doc)
    paths = [p for p, _ in exc.value.issues]
    assert paths[0] == "objects[0].bbox"
    assert "objects[2].id" in paths


@pytest.mark.parametrize("mutate, path", [
    (lambda d: d["objects"][1].update(bbox=[0.1, -0.1, 0.2]), "objects[1].bbox"),
    (lambda d: d.update(objects=[]), "objects"),
    (lambda d: d["objects"][0].update(room="garage"), "objects[0].room"),
    (lambda d: d.update(robot_start={"pos": [9.0, 1.0]}), "robot_start.pos"),
    (lambda d: d.update(floor_extent=[0.0, 4.0]), "floor_extent"),
])
def test_invalid_fields(mutate, path):
    doc = _doc()
    mutate(doc)
    with pytest.raises(SceneValidationError) as exc:
        parse_scene(doc)
    assert exc.value.field_path == path


def test_articulated_manipulable_is_rejected():
    doc = _doc()
    doc["objects"][1]["articulation"] = {
        "kind": "revolute", "fraction": 0.0, "open_threshold": 0.4,
        "swept_box": [[2.0, 2.0, 0.0], [2.2, 2.2, 0.5]],
    }
    with pytest.raises(SceneValidationError) as exc:
        parse_scene(doc)
    assert exc.value.field_path == "objects[1].articulation"


def test_unknown_category_needs_a_class_annotation():
    doc = _doc()
    doc["objects"][1]["category"] = "teapot"
    with pytest.raises(UnknownCategoryError):
        parse_scene(doc)
    doc["objects"][1]["class"] = "B"
    scene = parse_scene(doc)
    assert classify_object(scene.get("glass_0")) == ObjectClass.MANIPULABLE


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(SceneParseError) as exc:
        load_scene(tmp_path / "absent.json")
    assert exc.value.exit_code == EXIT_IO

    broken = tmp_path / "broken.json"
    broken.write_text('{"scene_id": "x", ', encoding="utf-8")
    with pytest.raises(SceneParseError, match="line 1"):
        load_scene(broken)

    listed = tmp_path / "list.json"
    listed.write_text("[]", encoding="utf-8")
    with pytest.raises(SceneParseError):
        load_scene(listed)


# ─── Scaling ──────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("category", sorted(defaults.FIXTURE_CATEGORIES))
def test_fixtures_are_never_scaled(category):
    big = ObjectSpec(id="f_0", category=category, bbox=(1.0, 1.0, 1.0), pos=(1.0, 1.0, 0.5))
    assert adjust_object_scale(big) == 1.0


def test_scaled_items_land_near_the_ideal_width():
    rng = np.random.default_rng(2024)
    for d in 0.5 - rng.uniform(0.0, 0.44, size=1000):
        factor = adjust_object_scale(_item(float(d)))
        assert 0.044 <= factor * d <= 0.056, (d, factor)


@pytest.mark.parametrize("mode", ["decimals", "grid"])
def test_scaled_items_always_fit_the_gripper(mode):
    widths = list(np.linspace(0.061, 8.0, 800)) + [1.4, 3.3, 7.0, 25.0]
    for d in widths:
        factor = adjust_object_scale(_item(float(d)), mode=mode)
        assert 0.0 < factor <= 1.0, (d, factor)
        assert factor * d <= defaults.GRIPPER_MAX_WIDTH, (d, factor)


def test_wide_items_round_down_instead_of_up():
    assert adjust_object_scale(_item(3.3)) == 0.01
    assert adjust_object_scale(_item(7.0)) == 0.007
    assert adjust_object_scale(_item(1.4), mode="grid") == 0.03


@pytest.mark.parametrize("mode", ["decimals", "grid"])
def test_scaling_is_idempotent(mode):
    rng = np.random.default_rng(7)
    for d in rng.uniform(0.061, 2.0, size=300):
        item = _item(float(d))
        factor = adjust_object_scale(item, mode=mode)
        assert adjust_object_scale(item, mode=mode, extents_scale=factor) == 1.0


def test_narrow_items_keep_their_size():
    assert adjust_object_scale(_item(0.06)) == 1.0
    assert adjust_object_scale(_item(0.03)) == 1.0


def test_reference_glass_scale():
    assert adjust_object_scale(_item(0.135)) == 0.37
    assert adjust_object_scale(_item(0.135), mode="grid") == 0.35


def test_first_occurrence_wins():
    glass = _item(0.135)
    shrunk = glass.model_copy(update={"bbox": (0.05, 0.05, 0.1)})
    assert first_occurrence_scales([glass, shrunk]) == {"item_0": 0.37}


# ─── Faults ───────────────────────────────────────────────────────────────────

def test_stiff_door_raises_the_threshold(scene_loader):
    scene = scene_loader("t1_kitchen")
    stiff = apply_faults(scene, {"stiff_door": True})
    assert stiff.get("refrigerator_0").articulation.open_threshold == 0.5
    assert scene.get("refrigerator_0").articulation.open_threshold == 0.4


def test_welding_skips_fixtures(scene_loader):
    scene = apply_faults(scene_loader("t4_kitchen"), {"welded_target": True})
    assert scene.get("glass_0").welded
    assert not scene.get("cabinet_0").welded
    assert not scene.get("table_0").welded


def test_named_fault_target(scene_loader):
    scene = apply_faults(scene_loader("t2_kitchen"), {"welded_target": "apple_0", "deep_shelf": False})
    assert scene.get("apple_0").welded
    assert scene.get("refrigerator_0").wall is None


def test_door_block_moves_the_swept_box_in_front_of_the_handle(scene_loader):
    scene = scene_loader("t1_kitchen_wide")
    blocked = apply_faults(scene, {"door_swept_volume_blocks_path": True})
    fridge = blocked.get("refrigerator_0")
    (x0, y0, _), (x1, y1, _) = fridge.articulation.swept_box
    face = fridge.pos[0] + fridge.bbox[0] / 2
    assert x0 == pytest.approx(face)
    assert x1 == pytest.approx(face + 0.5)
    assert y0 > fridge.pos[1]
    assert y1 == pytest.approx(fridge.pos[1] + fridge.bbox[1] / 2)


def test_rim_offset_thickens_open_top_containers(scene_loader):
    scene = apply_faults(scene_loader("t3_kitchen_wide_bowl"), {"rim_offset": True})
    assert scene.get("bowl_0").wall == 0.2
    assert scene.get("cabinet_0").wall is None


@pytest.mark.parametrize("faults, error", [
    ({"gravity_off": True}, InvalidParamError),
    ({"welded_target": "banana_0"}, UnknownObjectError),
])
def test_bad_fault_requests(scene_loader, faults, error):
    with pytest.raises(error):
        apply_faults(scene_loader("t1_kitchen"), faults)
