"""
Deterministic template planner.
A pure function of (keyword class, scene inventory): the same inputs always
give byte-identical expansions and decompositions.
"""

from __future__ import annotations
import logging
from typing import Optional

from ...core.errors import InvalidDecompositionError
from ...models.planning import DecomposeResponse, ExpandResponse, SubtaskConfig, SubtaskKind
from ...models.scene import ObjectClass, SceneConfig
from ...models.tasks import TaskKeyword
from ...scene.classify import canonical_category, classify_object, is_container
from ...world.predicates import inside, on_top
from ...world.state import WorldState
from ..keywords import IntentKind, KeywordIntent, Relation, parse_keyword, resolve_mention
from .base import Planner

log = logging.getLogger(__name__)


# ─── Name / detail templates ──────────────────────────────────────────────────

TASK_NAMES = {
    "open_and_put_into": "open_the_{f}_and_put_the_{x}_into_the_{f}",
    "put_into": "put_the_{x}_into_the_{f}",
    "put_into_container": "pick_up_{x}_and_put_into_{f}",
    "put_on": "put_the_{x}_on_the_{f}",
    "pick_up": "pick_up_{x}",
    "open": "open_the_{f}",
    "close": "close_the_{f}",
}

TASK_DETAILS = {
    "open_and_put_into": (
        "The robot should first open the {f} ({f_id}), then pick up the {x} ({x_id}) {from_s} and put it "
        "into the {f}, and finally close the {f} door."
    ),
    "put_into": "The robot should pick up the {x} ({x_id}) {from_s} and put it into the open {f} ({f_id}).",
    "put_into_container": "The robot should pick up the {x} ({x_id}) {from_s} and put it into the {f} ({f_id}).",
    "put_on": "The robot should pick up the {x} ({x_id}) {from_s} and place it on top of the {f} ({f_id}).",
    "pick_up": "The robot should pick up the {x} ({x_id}) {from_s} and hold it.",
    "open": "The robot should grasp the handle of the {f} ({f_id}) and open it.",
    "close": "The robot should grasp the handle of the {f} ({f_id}) and close it.",
}

SUBTASK_TEMPLATES = {
    SubtaskKind.OPEN: ("open_{f}", "Approach the {f} ({f_id}), grasp its handle and pull the door open."),
    SubtaskKind.PICK_UP: ("pick_up_{x}", "Move to the {x} ({x_id}) {at_s}, grasp it and lift it clear of its support."),
    SubtaskKind.PUT_INTO: ("put_{x}_into_{f}", "Carry the {x} ({x_id}) to the {f} ({f_id}) and release it inside."),
    SubtaskKind.PUT_ON: ("put_{x}_on_{f}", "Carry the {x} ({x_id}) to the {f} ({f_id}) and set it down on top."),
    SubtaskKind.CLOSE: ("close_{f}", "Return to the {f} ({f_id}), grasp its handle and push the door closed."),
}


def current_support(scene: SceneConfig, object_id: str) -> tuple[Optional[str], bool]:
    """(support id, is_inside) for the object in the initial scene; (None, False) if free-standing."""
    state = WorldState.initial(scene)
    for other in sorted(scene.object_ids):
        if other == object_id:
            continue
        if inside(state, object_id, other):
            return other, True
    for other in sorted(scene.object_ids):
        if other != object_id and on_top(state, object_id, other):
            return other, False
    return None, False


class TemplatePlanner(Planner):
    name = "template"

    # ── Classification ─────────────────────────────────────────────────────────

    def _plan_key(self, intent: KeywordIntent, scene: SceneConfig) -> tuple[str, str, Optional[str]]:
        """(template key, primary id, secondary id)."""
        if intent.kind in (IntentKind.OPEN, IntentKind.CLOSE):
            f = resolve_mention(intent.obj, scene)
            if scene.get(f).articulation is None:
                raise InvalidDecompositionError(f"{f!r} has no door or drawer to {intent.kind.value}")
            return intent.kind.value, f, None

        x = resolve_mention(intent.obj, scene)
        if classify_object(scene.get(x)) != ObjectClass.MANIPULABLE:
            raise InvalidDecompositionError(f"{x!r} is a fixture and cannot be picked up")
        if intent.kind == IntentKind.PICK:
            return "pick_up", x, None

        y = resolve_mention(intent.dest, scene)
        if y == x:
            raise InvalidDecompositionError(f"{x!r} cannot be placed relative to itself")
        dest = scene.get(y)
        if intent.relation == Relation.INTO:
            if dest.articulation is not None:
                closed = dest.articulation.fraction < dest.articulation.open_threshold
                return ("open_and_put_into" if closed else "put_into"), x, y
            if is_container(dest) and classify_object(dest) == ObjectClass.MANIPULABLE:
                return "put_into_container", x, y
            raise InvalidDecompositionError(f"{y!r} has no interior to put {x!r} into")
        return "put_on", x, y

    @staticmethod
    def _words(scene: SceneConfig, x: Optional[str], f: Optional[str]) -> dict[str, str]:
        words: dict[str, str] = {}
        if x is not None:
            words.update(x=canonical_category(scene.get(x).category), x_id=x)
            support, is_in = current_support(scene, x)
            if support is not None:
                s = canonical_category(scene.get(support).category).replace("_", " ")
                prep = "in" if is_in else "on"
                words.update(
                    from_s=f"from the {s} ({support})" if not is_in else f"out of the {s} ({support})",
                    at_s=f"{prep} the {s} ({support})",
                    s_id=support,
                )
            else:
                words.update(from_s="from the floor", at_s="on the floor")
        if f is not None:
            words.update(f=canonical_category(scene.get(f).category), f_id=f)
        return words

    # ── Stages ─────────────────────────────────────────────────────────────────

    def expand(self, keyword: TaskKeyword, scene: SceneConfig) -> ExpandResponse:
        intent = parse_keyword(keyword)
        key, a, b = self._plan_key(intent, scene)
        if key in ("open", "close"):
            words = self._words(scene, None, a)
        else:
            words = self._words(scene, a, b)
        return ExpandResponse(
            task_activity_name=TASK_NAMES[key].format(**words),
            task_detail_message=" ".join(TASK_DETAILS[key].format(**words).split()),
        )

    def decompose(self, expansion: ExpandResponse, keyword: TaskKeyword, scene: SceneConfig) -> DecomposeResponse:
        intent = parse_keyword(keyword)
        key, a, b = self._plan_key(intent, scene)

        steps: list[tuple[SubtaskKind, Optional[str], Optional[str]]]
        if key == "open":
            steps = [(SubtaskKind.OPEN, None, a)]
        elif key == "close":
            steps = [(SubtaskKind.CLOSE, None, a)]
        elif key == "pick_up":
            steps = [(SubtaskKind.PICK_UP, a, None)]
        elif key == "open_and_put_into":
            steps = [
                (SubtaskKind.OPEN, None, b),
                (SubtaskKind.PICK_UP, a, None),
                (SubtaskKind.PUT_INTO, a, b),
                (SubtaskKind.CLOSE, None, b),
            ]
        elif key in ("put_into", "put_into_container"):
            steps = [(SubtaskKind.PICK_UP, a, None), (SubtaskKind.PUT_INTO, a, b)]
        else:
            steps = [(SubtaskKind.PICK_UP, a, None), (SubtaskKind.PUT_ON, a, b)]

        configs = []
        for kind, x, f in steps:
            words = self._words(scene, x, f)
            name, description = SUBTASK_TEMPLATES[kind]
            if kind in (SubtaskKind.OPEN, SubtaskKind.CLOSE):
                target, s_init, s_goal = f, None, None
            elif kind == SubtaskKind.PICK_UP:
                target, s_init, s_goal = x, words.get("s_id"), None
            else:
                target, s_init, s_goal = x, None, f
            configs.append(SubtaskConfig(
                name=name.format(**words),
                description=description.format(**words),
                target_id=target,
                support_init_id=s_init,
                support_goal_id=s_goal,
                bddl_category=kind,
            ))
        log.debug("Decomposed %s into %d subtasks", expansion.task_activity_name, len(configs))
        return DecomposeResponse(subtasks=configs)
