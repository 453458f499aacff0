"""Shared fixtures: the bundled kitchen scenes and the task bundles generated from them."""

from pathlib import Path

import pytest

from taskworld.models.scene import SceneConfig
from taskworld.scene.faults import apply_faults
from taskworld.scene.loader import load_scene
from taskworld.taskgen.pipeline import GenerationBundle, generate
from taskworld.taskgen.planners import TemplatePlanner

SCENES_DIR = Path(__file__).resolve().parent / "scenes"

# family → (scene file stem, keyword)
FAMILIES = {
    "T1": ("t1_kitchen", "put the glass into the fridge"),
    "T2": ("t2_kitchen", "put the apple into the refrigerator"),
    "T3": ("t3_kitchen", "pick up the apple and put it into the bowl"),
    "T4": ("t4_kitchen", "put the cup on the table"),
}


def open_scene(name: str, faults: dict | None = None) -> SceneConfig:
    return apply_faults(load_scene(SCENES_DIR / f"{name}.json"), faults)


def make_bundle(name: str, keyword: str, faults: dict | None = None) -> tuple[SceneConfig, GenerationBundle]:
    scene = open_scene(name, faults)
    return scene, generate(keyword, scene, TemplatePlanner())


@pytest.fixture
def scene_loader():
    return open_scene


@pytest.fixture
def bundle_factory():
    return make_bundle


@pytest.fixture(scope="module")
def bundles() -> dict[str, tuple[SceneConfig, GenerationBundle]]:
    return {family: make_bundle(name, keyword) for family, (name, keyword) in FAMILIES.items()}
