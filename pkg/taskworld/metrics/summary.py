"""
Episode metrics.

  SR    successes / attempts
  ESR   rescued / episodes whose iteration-0 execution failed ("—" when none did)
  Iter  mean evolution iterations over successful episodes

Tables keep raw counts, so summaries of disjoint batches merge exactly.
"""

from __future__ import annotations
import logging
from dataclasses import dataclass, field, replace
from decimal import ROUND_HALF_UP, Decimal
from typing import Any, Optional

import pandas as pd

from ..core.errors import EmptyBatchError
from ..evolve.loop import ComplexEvolution

log = logging.getLogger(__name__)

COMPLETE = "Complete Task"
SUBTASK_AVG = "Subtask Avg"
OVERALL = "All"
DASH = "—"

_COUNT_FIELDS = ("attempts", "successes", "initial_failures", "rescued", "iterations")


# ─── Episode results ──────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SubtaskResult:
    name: str
    attempted: bool
    succeeded: bool
    iterations_used: int = 0
    initial_failure: bool = False

    @property
    def rescued(self) -> bool:
        return self.succeeded and self.iterations_used > 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "attempted": self.attempted,
            "succeeded": self.succeeded,
            "iterations_used": self.iterations_used,
            "initial_failure": self.initial_failure,
        }


@dataclass(frozen=True)
class EpisodeResult:
    scenario_id: str
    task: str
    category: str
    subtasks: tuple[SubtaskResult, ...] = ()
    error: Optional[str] = None

    @property
    def complete_success(self) -> bool:
        return self.error is None and bool(self.subtasks) and all(s.succeeded for s in self.subtasks)

    @property
    def total_iterations(self) -> int:
        return sum(s.iterations_used for s in self.subtasks)

    @property
    def initial_failure(self) -> bool:
        return any(s.initial_failure for s in self.subtasks)

    @property
    def rescued(self) -> bool:
        return self.complete_success and self.total_iterations > 0

    @classmethod
    def from_evolution(cls, scenario_id: str, category: str, evolution: ComplexEvolution) -> "EpisodeResult":
        items = []
        for k, task in enumerate(evolution.plan.subtasks):
            if k < len(evolution.results):
                h = evolution.results[k].history
                items.append(SubtaskResult(task.name, True, h.succeeded, h.iterations_used, h.initial_failure))
            else:
                items.append(SubtaskResult(task.name, False, False))
        return cls(scenario_id, evolution.plan.name, category, tuple(items))

    @classmethod
    def failed(cls, scenario_id: str, category: str, error: str, task: str = "") -> "EpisodeResult":
        return cls(scenario_id, task, category, (), error)

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario_id": self.scenario_id,
            "task": self.task,
            "category": self.category,
            "complete_success": self.complete_success,
            "total_iterations": self.total_iterations,
            "subtasks": [s.to_dict() for s in self.subtasks],
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "EpisodeResult":
        return cls(
            scenario_id=str(raw["scenario_id"]),
            task=raw.get("task", ""),
            category=raw.get("category", ""),
            subtasks=tuple(
                SubtaskResult(
                    name=s["name"],
                    attempted=bool(s["attempted"]),
                    succeeded=bool(s["succeeded"]),
                    iterations_used=int(s.get("iterations_used", 0)),
                    initial_failure=bool(s.get("initial_failure", False)),
                )
                for s in raw.get("subtasks", [])
            ),
            error=raw.get("error"),
        )


# ─── Counts and tables ────────────────────────────────────────────────────────

@dataclass(frozen=True)
class MetricCounts:
    attempts: int = 0
    successes: int = 0
    initial_failures: int = 0
    rescued: int = 0
    iterations: int = 0             # summed over successes only

    def __add__(self, other: "MetricCounts") -> "MetricCounts":
        return MetricCounts(*(getattr(self, f) + getattr(other, f) for f in _COUNT_FIELDS))

    @property
    def sr(self) -> Optional[float]:
        return 100.0 * self.successes / self.attempts if self.attempts else None

    @property
    def esr(self) -> Optional[float]:
        return 100.0 * self.rescued / self.initial_failures if self.initial_failures else None

    @property
    def iter(self) -> Optional[float]:
        return self.iterations / self.successes if self.successes else None

    def to_dict(self) -> dict[str, Any]:
        return {f: getattr(self, f) for f in _COUNT_FIELDS} | {"sr": self.sr, "esr": self.esr, "iter": self.iter}


def _subtask_column(k: int) -> str:
    return f"Subtask {k + 1}"


def _column_order(columns) -> list[str]:
    subs = sorted((c for c in columns if c != COMPLETE), key=lambda c: int(c.split()[-1]))
    return subs + ([COMPLETE] if COMPLETE in columns else [])


@dataclass(frozen=True)
class MetricTable:
    """category → column → counts. Columns are "Subtask k" and "Complete Task"."""
    cells: dict[str, dict[str, MetricCounts]] = field(default_factory=dict)

    @property
    def episodes(self) -> int:
        return sum(row[COMPLETE].attempts for row in self.cells.values() if COMPLETE in row)

    def categories(self) -> list[str]:
        return sorted(self.cells)

    def columns(self) -> list[str]:
        return _column_order({c for row in self.cells.values() for c in row})

    def overall(self) -> dict[str, MetricCounts]:
        total: dict[str, MetricCounts] = {}
        for row in self.cells.values():
            for col, counts in row.items():
                total[col] = total.get(col, MetricCounts()) + counts
        return total

    def row(self, category: str) -> dict[str, MetricCounts]:
        return self.overall() if category == OVERALL else self.cells[category]

    def subtask_avg(self, category: str = OVERALL) -> dict[str, Optional[float]]:
        """Unweighted mean over the subtask columns of each defined metric."""
        row = self.row(category)
        subs = [row[c] for c in _column_order(row) if c != COMPLETE]
        out: dict[str, Optional[float]] = {}
        for metric in ("sr", "esr", "iter"):
            values = [getattr(c, metric) for c in subs if getattr(c, metric) is not None]
            out[metric] = sum(values) / len(values) if values else None
        return out

    def to_dict(self) -> dict[str, Any]:
        overall = self.overall()
        return {
            "episodes": self.episodes,
            "categories": {
                cat: {col: self.cells[cat][col].to_dict() for col in _column_order(self.cells[cat])}
                for cat in self.categories()
            },
            "overall": {col: overall[col].to_dict() for col in self.columns()},
            "subtask_avg": self.subtask_avg(),
        }

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "MetricTable":
        return cls({
            cat: {col: MetricCounts(**{f: int(v[f]) for f in _COUNT_FIELDS}) for col, v in row.items()}
            for cat, row in raw.get("categories", {}).items()
        })


# ─── Operations ───────────────────────────────────────────────────────────────

def _frame(results: list[EpisodeResult]) -> pd.DataFrame:
    rows = []
    for r in results:
        for k, s in enumerate(r.subtasks):
            rows.append({
                "category": r.category, "column": _subtask_column(k),
                "success": s.succeeded, "initial_failure": s.initial_failure,
                "rescued": s.rescued, "iterations": s.iterations_used if s.succeeded else 0,
            })
        rows.append({
            "category": r.category, "column": COMPLETE,
            "success": r.complete_success, "initial_failure": r.initial_failure,
            "rescued": r.rescued, "iterations": r.total_iterations if r.complete_success else 0,
        })
    return pd.DataFrame(rows)


def summarize(results: list[EpisodeResult]) -> MetricTable:
    if not results:
        raise EmptyBatchError("cannot summarize an empty batch of episodes")
    df = _frame(results)
    grouped = df.groupby(["category", "column"], sort=True).agg(
        attempts=("success", "size"),
        successes=("success", "sum"),
        initial_failures=("initial_failure", "sum"),
        rescued=("rescued", "sum"),
        iterations=("iterations", "sum"),
    )
    cells: dict[str, dict[str, MetricCounts]] = {}
    for (category, column), row in grouped.iterrows():
        cells.setdefault(category, {})[column] = MetricCounts(*(int(row[f]) for f in _COUNT_FIELDS))
    table = MetricTable(cells)
    log.info("Summarized %d episodes in %d categories", len(results), len(cells))
    return table


def merge(a: MetricTable, b: MetricTable) -> MetricTable:
    cells = {cat: dict(row) for cat, row in a.cells.items()}
    for cat, row in b.cells.items():
        target = cells.setdefault(cat, {})
        for col, counts in row.items():
            target[col] = target.get(col, MetricCounts()) + counts
    return replace(a, cells=cells)


# ─── Rendering ────────────────────────────────────────────────────────────────

def fmt_metric(value: Optional[float]) -> str:
    """One decimal, half up; undefined values render as an em dash."""
    if value is None:
        return DASH
    return str(Decimal(repr(value)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def render(table: MetricTable) -> str:
    """Plain-text table: SR | ESR | Iter per subtask, then Complete Task and Subtask Avg."""
    columns = table.columns()
    headers = ["Category"]
    for col in columns + [SUBTASK_AVG]:
        headers += [f"{col} SR", "ESR", "Iter"]

    lines = []
    for category in table.categories() + [OVERALL]:
        row = table.row(category)
        cells = [category]
        for col in columns:
            counts = row.get(col)
            cells += [fmt_metric(counts.sr if counts else None),
                      fmt_metric(counts.esr if counts else None),
                      fmt_metric(counts.iter if counts else None)]
        avg = table.subtask_avg(category)
        cells += [fmt_metric(avg["sr"]), fmt_metric(avg["esr"]), fmt_metric(avg["iter"])]
        lines.append(cells)

    widths = [max(len(str(r[i])) for r in [headers] + lines) for i in range(len(headers))]
    out = [" | ".join(h.ljust(w) for h, w in zip(headers, widths))]
    out.append("-+-".join("-" * w for w in widths))
    out += [" | ".join(c.ljust(w) for c, w in zip(r, widths)) for r in lines]
    return "\n".join(out) + "\n"
