"""
OpenTelemetry tracing setup.
Opt-in via TASKWORLD_TRACING=1 in .env. Spans go to the console exporter, or
to an OTLP/HTTP collector when OTEL_EXPORTER_OTLP_ENDPOINT is set.
"""
from __future__ import annotations
import os
import logging

log = logging.getLogger(__name__)

_initialized = False


def tracing_enabled() -> bool:
    """Return True if TASKWORLD_TRACING env var is set to a truthy value."""
    return os.getenv("TASKWORLD_TRACING", "0").strip().lower() in ("1", "true", "yes")


def init_tracing() -> bool:
    """
    Install a TracerProvider with a batch exporter. No-op if TASKWORLD_TRACING != 1.
    Safe to call more than once.
    """
    global _initialized
    if _initialized:
        return True
    if not tracing_enabled():
        return False

    try:
        from opentelemetry import trace
        from opentelemetry.sdk.resources import Resource
        from opentelemetry.sdk.trace import TracerProvider
        from opentelemetry.sdk.trace.export import BatchSpanProcessor, ConsoleSpanExporter

        provider = TracerProvider(resource=Resource.create({"service.name": "taskworld"}))

        endpoint = os.getenv("OTEL_EXPORTER_OTLP_ENDPOINT", "").strip()
        if endpoint:
            from opentelemetry.exporter.otlp.proto.http.trace_exporter import OTLPSpanExporter
            exporter = OTLPSpanExporter(endpoint=endpoint.rstrip("/") + "/v1/traces")
        else:
            exporter = ConsoleSpanExporter()

        provider.add_span_processor(BatchSpanProcessor(exporter))
        trace.set_tracer_provider(provider)
        _initialized = True
        log.info("Tracing enabled -> %s", endpoint or "console")
        return True

    except ImportError as e:
        log.warning(
            "OpenTelemetry SDK not installed, tracing disabled. "
            "To enable: pip install opentelemetry-sdk opentelemetry-exporter-otlp-proto-http (%s)",
            e,
        )
    except Exception as e:
        log.warning("Tracing init failed (continuing without tracing): %s", e)
    return False


def get_tracer():
    """
    Return an OpenTelemetry tracer for manual pipeline spans.
    When tracing is disabled, OTel falls back to its no-op provider.
    """
    from opentelemetry import trace
    return trace.get_tracer("taskworld")
