"""Resilient JSON-over-HTTP client with retries, backoff and an in-flight cap."""

from __future__ import annotations
import logging
import random
import threading
import time
from typing import Any

import httpx

from ..config.settings import Endpoint, RemoteSettings
from .errors import RemoteFailure
from .tracer import get_tracer

log = logging.getLogger(__name__)

RETRY_STATUS = (429, 500, 502, 503, 504)


class JsonClient:
    """
    POSTs JSON documents to one endpoint.

    Server errors, 429 and transport failures are retried with exponential
    backoff; after `max_retries` the configured `unavailable` error is raised.
    Other client errors fail at once. Concurrent
    callers share one connection pool and at most `max_in_flight` requests run
    at once.
    """

    def __init__(
        self,
        endpoint: Endpoint,
        settings: RemoteSettings | None = None,
        *,
        unavailable: type[RemoteFailure] = RemoteFailure,
        transport: httpx.BaseTransport | None = None,
    ) -> None:
        self.endpoint = endpoint
        self.settings = settings or RemoteSettings()
        self.unavailable = unavailable
        headers = {"Content-Type": "application/json"}
        if endpoint.token:
            headers["Authorization"] = f"Bearer {endpoint.token}"
        self.client = httpx.Client(
            timeout=self.settings.timeout_seconds,
            headers=headers,
            transport=transport,
        )
        self._sem = threading.BoundedSemaphore(self.settings.max_in_flight)
        self._rng = random.Random(self.settings.jitter_seed)

    def post_json(self, payload: dict[str, Any]) -> dict[str, Any]:
        tracer = get_tracer()
        with tracer.start_as_current_span("remote.post") as span:
            span.set_attribute("remote.url", self.endpoint.url)
            with self._sem:
                return self._post_with_retries(payload, span)

    def _post_with_retries(self, payload: dict[str, Any], span) -> dict[str, Any]:
        last_error = ""
        for attempt in range(self.settings.max_retries + 1):
            if attempt:
                delay = self.settings.backoff_seconds * (2 ** (attempt - 1))
                time.sleep(delay + self._rng.uniform(0, self.settings.backoff_seconds / 3))
            try:
                r = self.client.post(self.endpoint.url, json=payload)
                if r.status_code in RETRY_STATUS:
                    last_error = f"HTTP {r.status_code}"
                    log.warning("%s from %s (attempt %d)", last_error, self.endpoint.url, attempt + 1)
                    continue
                if r.is_client_error:
                    # 4xx other than 429 fails on the first attempt
                    span.set_attribute("remote.error", f"HTTP {r.status_code}")
                    raise self.unavailable(f"{self.endpoint.url} rejected the request: HTTP {r.status_code}")
                r.raise_for_status()
                span.set_attribute("remote.attempts", attempt + 1)
                body = r.json()
                if not isinstance(body, dict):
                    raise self.unavailable(f"{self.endpoint.url} returned a non-object JSON body")
                return body
            except RemoteFailure:
                raise
            except (httpx.HTTPError, ValueError) as e:
                last_error = str(e) or type(e).__name__
                log.warning("Request to %s failed (attempt %d): %s",
                            self.endpoint.url, attempt + 1, last_error)

        span.set_attribute("remote.error", last_error)
        raise self.unavailable(
            f"{self.endpoint.url} unavailable after {self.settings.max_retries + 1} attempts: {last_error}"
        )

    def close(self) -> None:
        self.client.close()

    def __enter__(self) -> "JsonClient":
        return self

    def __exit__(self, *args) -> None:
        self.close()
