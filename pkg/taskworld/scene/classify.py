"""Object taxonomy: fixtures (class A) versus manipulable items (class B)."""

from __future__ import annotations

from ..config import defaults
from ..core.errors import UnknownCategoryError
from ..models.scene import ObjectClass, ObjectSpec


def canonical_category(category: str) -> str:
    name = category.strip().lower().replace(" ", "_")
    return defaults.CATEGORY_SYNONYMS.get(name, name)


def classify_object(spec: ObjectSpec) -> ObjectClass:
    """An explicit class annotation wins over list membership."""
    if spec.object_class is not None:
        return spec.object_class
    category = canonical_category(spec.category)
    if category in defaults.FIXTURE_CATEGORIES:
        return ObjectClass.FIXTURE
    if category in defaults.MANIPULABLE_CATEGORIES:
        return ObjectClass.MANIPULABLE
    raise UnknownCategoryError(
        f"object {spec.id!r} has category {spec.category!r}, which is neither a fixture nor a "
        f"manipulable item; annotate it with \"class\": \"A\" or \"B\""
    )


def is_container(spec: ObjectSpec) -> bool:
    """Open-top items that can receive another object."""
    return canonical_category(spec.category) in defaults.CONTAINER_CATEGORIES
