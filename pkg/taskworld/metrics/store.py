"""
Result persistence.
  episodes.jsonl  one EpisodeResult per line, appended batch after batch
  summary.json    MetricTable over every episode in episodes.jsonl
  summary.txt     rendered table
"""

from __future__ import annotations
import json
import logging
from pathlib import Path

from ..core.errors import PersistIOError
from .summary import EpisodeResult, MetricTable, render, summarize

log = logging.getLogger(__name__)

EPISODES_FILE = "episodes.jsonl"
SUMMARY_FILE = "summary.json"
TABLE_FILE = "summary.txt"


def persist(results: list[EpisodeResult], out_dir: str | Path, *, append: bool = False) -> MetricTable:
    """Write the batch and refresh the summary; returns the table over all stored episodes."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        with (out / EPISODES_FILE).open("a" if append else "w", encoding="utf-8") as f:
            for r in results:
                f.write(json.dumps(r.to_dict(), ensure_ascii=False) + "\n")
    except OSError as e:
        raise PersistIOError(f"cannot write results to {out}: {e}") from e

    table = summarize(load_results(out))
    try:
        (out / SUMMARY_FILE).write_text(
            json.dumps(table.to_dict(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
        (out / TABLE_FILE).write_text(render(table), encoding="utf-8")
    except OSError as e:
        raise PersistIOError(f"cannot write summary to {out}: {e}") from e
    log.info("Persisted %d episodes to %s (%d total)", len(results), out, table.episodes)
    return table


def load_results(out_dir: str | Path) -> list[EpisodeResult]:
    path = Path(out_dir) / EPISODES_FILE
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise PersistIOError(f"cannot read {path}: {e}") from e
    results = []
    for n, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            results.append(EpisodeResult.from_dict(json.loads(line)))
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise PersistIOError(f"{path}:{n}: malformed episode record: {e}") from e
    return results


def load_summary(out_dir: str | Path) -> MetricTable:
    path = Path(out_dir) / SUMMARY_FILE
    try:
        return MetricTable.from_dict(json.loads(path.read_text(encoding="utf-8")))
    except OSError as e:
        raise PersistIOError(f"cannot read {path}: {e}") from e
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise PersistIOError(f"{path} is not a valid summary: {e}") from e
