"""
Runtime settings.
Remote planner/critic endpoints come from the environment (AGT_PLANNER_URL,
AGT_PLANNER_TOKEN, AGT_CRITIC_URL, AGT_CRITIC_TOKEN; a local .env is honoured).
Timeouts, retries and the in-flight cap come from an optional JSON config file
named by --config or TASKWORLD_CONFIG.
"""

from __future__ import annotations
import json
import logging
import os
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from ..core.errors import ConfigError, PersistIOError

load_dotenv()

log = logging.getLogger(__name__)

PLANNER_URL_ENV = "AGT_PLANNER_URL"
PLANNER_TOKEN_ENV = "AGT_PLANNER_TOKEN"
CRITIC_URL_ENV = "AGT_CRITIC_URL"
CRITIC_TOKEN_ENV = "AGT_CRITIC_TOKEN"
CONFIG_PATH_ENV = "TASKWORLD_CONFIG"


class RemoteSettings(BaseModel):
    """Transport limits shared by the remote planner and critic clients."""
    timeout_seconds: float = Field(default=20.0, gt=0)
    max_retries: int = Field(default=2, ge=0)
    backoff_seconds: float = Field(default=0.6, ge=0)
    max_in_flight: int = Field(default=4, ge=1)
    jitter_seed: int | None = None     # seeds the retry backoff jitter; None draws from the OS


class Endpoint(BaseModel):
    url: str
    token: str = ""


class Settings(BaseModel):
    remote: RemoteSettings = Field(default_factory=RemoteSettings)


def load_settings(path: str | Path | None = None) -> Settings:
    """Read the JSON config file if one is given (or named in the env); defaults otherwise."""
    path = path or os.getenv(CONFIG_PATH_ENV) or None
    if path is None:
        return Settings()
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise PersistIOError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise PersistIOError(f"config {path} is not valid JSON: {e}") from e
    try:
        settings = Settings.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"config {path} rejected: {e.errors()[0]['msg']}") from e
    log.info("Loaded settings from %s", path)
    return settings


def _endpoint(url_env: str, token_env: str, role: str) -> Endpoint:
    url = os.getenv(url_env, "").strip()
    if not url:
        raise ConfigError(f"{role} mode 'remote' requires {url_env} to be set")
    return Endpoint(url=url, token=os.getenv(token_env, "").strip())


def planner_endpoint() -> Endpoint:
    return _endpoint(PLANNER_URL_ENV, PLANNER_TOKEN_ENV, "planner")


def critic_endpoint() -> Endpoint:
    return _endpoint(CRITIC_URL_ENV, CRITIC_TOKEN_ENV, "critic")
