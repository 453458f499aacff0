from ...config.settings import RemoteSettings
from ...core.errors import InvalidParamError
from .base import Planner
from .remote import RemotePlanner
from .template import TemplatePlanner

PLANNER_MODES = ("template", "remote")


def build_planner(mode: str, settings: RemoteSettings | None = None) -> Planner:
    if mode == "template":
        return TemplatePlanner()
    if mode == "remote":
        return RemotePlanner(settings)
    raise InvalidParamError(f"unknown planner mode {mode!r}; expected one of {PLANNER_MODES}")


__all__ = ["Planner", "TemplatePlanner", "RemotePlanner", "PLANNER_MODES", "build_planner"]
