"""
Keyword classes recognised by the template planner, and resolution of the
objects a keyword mentions to scene ids.
"""

from __future__ import annotations
import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from ..config import defaults
from ..core.errors import InvalidDecompositionError, NoTemplateError, UnresolvedObjectError
from ..models.scene import SceneConfig
from ..models.tasks import TaskKeyword
from ..scene.classify import canonical_category

_ARTICLE = r"(?:(?:the|a|an)\s+)?"


class IntentKind(str, Enum):
    PLACE = "place"
    PICK = "pick"
    OPEN = "open"
    CLOSE = "close"


class Relation(str, Enum):
    INTO = "into"
    ONTO = "onto"


_RELATIONS = {
    "into": Relation.INTO, "in": Relation.INTO, "inside": Relation.INTO,
    "onto": Relation.ONTO, "on": Relation.ONTO, "on top of": Relation.ONTO,
}

# Ordered; the first match wins.
_PATTERNS: list[tuple[IntentKind, re.Pattern]] = [
    (IntentKind.PLACE, re.compile(
        rf"^(?:pick up|grab|take)\s+{_ARTICLE}(?P<obj>.+?)\s+and\s+(?:put|place|drop)\s+(?:it\s+)?"
        rf"(?P<rel>into|inside|in|onto|on top of|on)\s+{_ARTICLE}(?P<dest>.+)$"
    )),
    (IntentKind.PLACE, re.compile(
        rf"^(?:put|place|transport|move|transfer|bring)\s+{_ARTICLE}(?P<obj>.+?)\s+"
        rf"(?P<rel>into|inside|in|onto|on top of|on)\s+{_ARTICLE}(?P<dest>.+)$"
    )),
    (IntentKind.PICK, re.compile(rf"^(?:pick up|grab|lift)\s+{_ARTICLE}(?P<obj>.+)$")),
    (IntentKind.OPEN, re.compile(rf"^open\s+{_ARTICLE}(?P<obj>.+)$")),
    (IntentKind.CLOSE, re.compile(rf"^(?:close|shut)\s+{_ARTICLE}(?P<obj>.+)$")),
]


@dataclass(frozen=True)
class KeywordIntent:
    kind: IntentKind
    obj: str
    dest: Optional[str] = None
    relation: Optional[Relation] = None


def parse_keyword(keyword: TaskKeyword) -> KeywordIntent:
    text = keyword.text.lower().strip().rstrip(".!")
    for kind, pattern in _PATTERNS:
        m = pattern.match(text)
        if m:
            groups = m.groupdict()
            rel = groups.get("rel")
            return KeywordIntent(
                kind=kind,
                obj=groups["obj"].strip(),
                dest=(groups.get("dest") or "").strip() or None,
                relation=_RELATIONS[rel] if rel else None,
            )
    raise NoTemplateError(
        f"keyword {keyword.text!r} matches no template (put/place X into/onto Y, pick up X, open/close F)"
    )


def _candidates(scene: SceneConfig, category: str) -> list[str]:
    return sorted(o.id for o in scene.objects if canonical_category(o.category) == category)


def resolve_mention(mention: str, scene: SceneConfig) -> str:
    """
    Map a mention to an object id: an exact id wins, then the canonical
    category, then its fallback category. Ties resolve to the smallest id.
    """
    token = mention.strip().lower().replace(" ", "_")
    if scene.has(token):
        return token
    category = canonical_category(token)
    for candidate in (category, defaults.CATEGORY_FALLBACKS.get(category)):
        if candidate:
            ids = _candidates(scene, candidate)
            if ids:
                return ids[0]
    if category in defaults.FIXTURE_CATEGORIES:
        raise InvalidDecompositionError(
            f"scene {scene.scene_id!r} has no {category} to act on for {mention!r}"
        )
    raise UnresolvedObjectError(f"{mention!r} does not name any object in scene {scene.scene_id!r}")
