"""SR / ESR / Iter aggregation, merging of partial batches, rendering and persistence."""

import json
import random

import pytest

from taskworld.core.errors import EmptyBatchError, PersistIOError
from taskworld.metrics.store import EPISODES_FILE, SUMMARY_FILE, TABLE_FILE, load_results, load_summary, persist
from taskworld.metrics.summary import (
    COMPLETE,
    DASH,
    OVERALL,
    EpisodeResult,
    MetricCounts,
    SubtaskResult,
    fmt_metric,
    merge,
    render,
    summarize,
)


def _episode(sid, category, *subtasks, error=None) -> EpisodeResult:
    """subtasks as (succeeded, iterations_used, initial_failure); None marks an unattempted one."""
    items = []
    for k, s in enumerate(subtasks):
        if s is None:
            items.append(SubtaskResult(f"s{k + 1}", False, False))
        else:
            ok, iters, first_failed = s
            items.append(SubtaskResult(f"s{k + 1}", True, ok, iters, first_failed))
    return EpisodeResult(sid, f"task_{category}", category, tuple(items), error)


CLEAN = (True, 0, False)
RESCUED_ONCE = (True, 1, True)
EXHAUSTED = (False, 5, True)


def _random_episode(rng: random.Random, n: int) -> EpisodeResult:
    category = rng.choice(["T1", "T2", "T3", "T4"])
    if rng.random() < 0.1:
        return EpisodeResult.failed(f"e{n}", category, "boom")
    width = 4 if category == "T1" else 2
    subtasks, stopped = [], False
    for _ in range(width):
        if stopped:
            subtasks.append(None)
            continue
        first_failed = rng.random() < 0.4
        iters = rng.randint(1, 5) if first_failed else 0
        ok = not first_failed or rng.random() < 0.6
        subtasks.append((ok, iters, first_failed))
        stopped = not ok
    return _episode(f"e{n}", category, *subtasks)


# ─── Counts ───────────────────────────────────────────────────────────────────

def test_success_rate_over_a_large_batch():
    results = [_episode(f"e{i}", "T3", CLEAN, CLEAN) for i in range(73)]
    results += [_episode(f"f{i}", "T3", CLEAN, EXHAUSTED) for i in range(29)]
    table = summarize(results)
    complete = table.cells["T3"][COMPLETE]
    assert (complete.attempts, complete.successes) == (102, 73)
    assert fmt_metric(complete.sr) == "71.6"
    assert table.episodes == 102


def test_success_rate_is_monotone_in_added_episodes():
    rng = random.Random(5)
    results = [_random_episode(rng, n) for n in range(40)]
    for n in range(40, 120):
        before = summarize(results).row(OVERALL)[COMPLETE].sr
        if rng.random() < 0.5:
            results.append(_episode(f"e{n}", "T3", CLEAN, RESCUED_ONCE))
            assert summarize(results).row(OVERALL)[COMPLETE].sr >= before
        else:
            results.append(_episode(f"e{n}", "T3", CLEAN, EXHAUSTED))
            assert summarize(results).row(OVERALL)[COMPLETE].sr <= before


def test_esr_is_undefined_without_initial_failures():
    table = summarize([_episode("a", "T4", CLEAN, CLEAN), _episode("b", "T4", CLEAN, CLEAN)])
    assert table.cells["T4"][COMPLETE].esr is None
    assert table.cells["T4"][COMPLETE].iter == 0.0
    assert DASH in render(table)


def test_esr_and_iterations_count_rescued_episodes():
    results = [
        _episode("a", "T2", RESCUED_ONCE, CLEAN),
        _episode("b", "T2", RESCUED_ONCE, (True, 3, True)),
        _episode("c", "T2", CLEAN, (True, 2, True)),
        _episode("d", "T2", EXHAUSTED, None),
        _episode("e", "T2", CLEAN, CLEAN),
    ]
    row = summarize(results).cells["T2"]
    assert row[COMPLETE].esr == 75.0
    assert row[COMPLETE].sr == 80.0
    # 1 + 4 + 2 + 0 over four successes
    assert row[COMPLETE].iter == 1.75
    assert row["Subtask 1"].esr == pytest.approx(200 / 3)
    assert row["Subtask 2"].attempts == 5
    assert row["Subtask 2"].successes == 4


def test_unattempted_subtasks_count_as_failed_attempts():
    row = summarize([_episode("x", "T1", CLEAN, EXHAUSTED, None, None)]).cells["T1"]
    assert [row[f"Subtask {k}"].sr for k in range(1, 5)] == [100.0, 0.0, 0.0, 0.0]
    assert row[COMPLETE].sr == 0.0


def test_errored_episodes_fail_without_entering_esr():
    table = summarize([
        EpisodeResult.failed("bad", "T1", "scene missing"),
        _episode("ok", "T1", RESCUED_ONCE, CLEAN, CLEAN, CLEAN),
    ])
    complete = table.cells["T1"][COMPLETE]
    assert (complete.attempts, complete.successes) == (2, 1)
    assert complete.initial_failures == 1
    assert complete.esr == 100.0


def test_subtask_average_is_unweighted():
    table = summarize([
        _episode("a", "T1", CLEAN, CLEAN, CLEAN, EXHAUSTED),
        _episode("b", "T3", CLEAN, CLEAN),
    ])
    avg = table.subtask_avg("T1")
    assert avg["sr"] == 75.0
    assert avg["esr"] == 0.0
    overall = table.subtask_avg(OVERALL)
    # Subtask 1 and 2 pool both episodes; 3 and 4 only the T1 one
    assert overall["sr"] == pytest.approx((100 + 100 + 100 + 0) / 4)


def test_empty_batch():
    with pytest.raises(EmptyBatchError):
        summarize([])


# ─── Merging ──────────────────────────────────────────────────────────────────

def test_merge_of_any_partition_matches_the_whole():
    rng = random.Random(5)
    for trial in range(100):
        results = [_random_episode(rng, n) for n in range(rng.randint(3, 30))]
        cuts = sorted(rng.sample(range(1, len(results)), 2))
        parts = [results[:cuts[0]], results[cuts[0]:cuts[1]], results[cuts[1]:]]
        a, b, c = (summarize(p) for p in parts)
        whole = summarize(results).cells
        assert merge(merge(a, b), c).cells == whole, trial
        assert merge(a, merge(b, c)).cells == whole, trial


def test_counts_add_field_by_field():
    total = MetricCounts(2, 1, 1, 0, 0) + MetricCounts(3, 3, 2, 2, 4)
    assert total == MetricCounts(5, 4, 3, 2, 4)
    assert total.to_dict()["sr"] == 80.0


# ─── Rendering ────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("value, text", [
    (None, "—"),
    (100.0, "100.0"),
    (0.0, "0.0"),
    (0.25, "0.3"),
    (66.66666666666667, "66.7"),
    (2.45, "2.5"),
    (1.75, "1.8"),
])
def test_fmt_metric(value, text):
    assert fmt_metric(value) == text


def test_rendered_table_lists_every_category():
    table = summarize([_episode("a", "T2", CLEAN, CLEAN), _episode("b", "T4", RESCUED_ONCE, CLEAN)])
    lines = render(table).splitlines()
    assert lines[0].startswith("Category")
    assert "Complete Task SR" in lines[0]
    assert "Subtask Avg SR" in lines[0]
    assert [line.split("|")[0].strip() for line in lines[2:]] == ["T2", "T4", OVERALL]


# ─── Persistence ──────────────────────────────────────────────────────────────

def test_persist_and_reload(tmp_path):
    first = [_episode("a", "T3", CLEAN, CLEAN), EpisodeResult.failed("b", "T3", "boom")]
    table = persist(first, tmp_path)
    assert {p.name for p in tmp_path.iterdir()} == {EPISODES_FILE, SUMMARY_FILE, TABLE_FILE}
    assert load_results(tmp_path) == first
    assert load_summary(tmp_path).cells == table.cells

    second = [_episode("c", "T3", RESCUED_ONCE, CLEAN)]
    table = persist(second, tmp_path, append=True)
    assert table.episodes == 3
    assert load_results(tmp_path) == first + second
    assert load_summary(tmp_path).cells == summarize(first + second).cells
    assert json.loads((tmp_path / SUMMARY_FILE).read_text(encoding="utf-8"))["episodes"] == 3


def test_overwrite_replaces_earlier_batches(tmp_path):
    persist([_episode("a", "T3", CLEAN, CLEAN)], tmp_path)
    persist([_episode("b", "T4", CLEAN, CLEAN)], tmp_path)
    assert [r.scenario_id for r in load_results(tmp_path)] == ["b"]


def test_missing_and_corrupt_results(tmp_path):
    with pytest.raises(PersistIOError):
        load_results(tmp_path)
    with pytest.raises(PersistIOError):
        load_summary(tmp_path)
    (tmp_path / EPISODES_FILE).write_text('{"scenario_id": "x", \n', encoding="utf-8")
    with pytest.raises(PersistIOError, match=":1:"):
        load_results(tmp_path)
