from ...config.settings import RemoteSettings
from ...core.errors import InvalidParamError
from .base import Critic
from .oracle import OracleCritic
from .remote import RemoteCritic

CRITIC_MODES = ("oracle", "remote")


def build_critic(mode: str, settings: RemoteSettings | None = None) -> Critic:
    if mode == "oracle":
        return OracleCritic()
    if mode == "remote":
        return RemoteCritic(settings)
    raise InvalidParamError(f"unknown critic mode {mode!r}; expected one of {CRITIC_MODES}")


__all__ = ["Critic", "OracleCritic", "RemoteCritic", "CRITIC_MODES", "build_critic"]
