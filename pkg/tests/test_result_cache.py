from datetime import datetime, timezone

import simplejson

from services.davenport_search import STATUS_EXACT, STATUS_LOWER_BOUND, ConstantRecord
from services.result_cache import CacheEntry, ResultCache, cache_key, dumps


TS = datetime(2026, 10, 16, 12, 0, 0, tzinfo=timezone.utc)


def _record(value=4, status=STATUS_EXACT, n=15, spec="S", node_count=0):
    return ConstantRecord(n, spec, "D", value, tuple([1] * (value - 1)), status, node_count=node_count)


def test_dumps_is_sorted_and_compact():
    assert dumps({'b': 1, 'a': [1, 2]}) == '{"a":[1,2],"b":1}'


def test_cache_key():
    assert cache_key(77, "L:7", "D") == "D:77:L:7"


def test_line_schema(tmp_path):
    cache = ResultCache(str(tmp_path / "cache.jsonl"))
    entry = cache.put(_record(node_count=57), ts=TS)
    data = simplejson.loads(entry.to_line())
    assert data == {
        'key': "D:15:S",
        'kind': "D",
        'n': 15,
        'weights': "S",
        'value': 4,
        'status': "exact",
        'witness': [1, 1, 1],
        'node_count': 57,
        'elapsed_ms': 0.0,
        'engine_version': "1.0.0",
        'ts': "2026-10-16T12:00:00+00:00",
    }


def test_reload_rewrites_identical_lines(tmp_path):
    path = tmp_path / "cache.jsonl"
    cache = ResultCache(str(path))
    cache.put(_record(), ts=TS)
    cache.put(_record(3, n=77, spec="S"), ts=TS)
    original = path.read_text(encoding="utf-8").splitlines()

    reloaded = ResultCache(str(path)).load()
    assert [reloaded[key].to_line() for key in ("D:15:S", "D:77:S")] == original
    assert CacheEntry.from_dict(simplejson.loads(original[0])).ts == TS


def test_last_entry_wins(tmp_path):
    path = str(tmp_path / "cache.jsonl")
    ResultCache(path).put(_record(5, STATUS_LOWER_BOUND), ts=TS)
    ResultCache(path).put(_record(4), ts=TS)
    record = ResultCache(path).get(15, "S", "D")
    assert record.value == 4 and record.is_exact


def test_other_engine_versions_are_ignored(tmp_path):
    path = str(tmp_path / "cache.jsonl")
    ResultCache(path, engine_version="0.9.0").put(_record(), ts=TS)
    assert ResultCache(path).get(15, "S", "D") is None
    assert ResultCache(path, engine_version="0.9.0").get(15, "S", "D").value == 4


def test_unreadable_lines_are_skipped(tmp_path):
    path = tmp_path / "cache.jsonl"
    ResultCache(str(path)).put(_record(), ts=TS)
    with open(path, "a", encoding="utf-8") as handle:
        handle.write("not json\n\n")
        handle.write('{"key": "D:7:Q"}\n')
    entries = ResultCache(str(path)).load()
    assert list(entries) == ["D:15:S"]


def test_missing_file_and_nested_directory(tmp_path):
    path = tmp_path / "deep" / "dir" / "cache.jsonl"
    cache = ResultCache(str(path))
    assert cache.get(15, "S", "D") is None
    cache.put(_record(), ts=TS)
    assert path.exists()
    assert cache.get(15, "S", "D").value == 4


def test_node_count_survives_a_reload(tmp_path):
    path = str(tmp_path / "cache.jsonl")
    ResultCache(path).put(_record(node_count=1234), ts=TS)
    assert ResultCache(path).get(15, "S", "D").node_count == 1234


def test_lines_without_search_effort_still_load():
    data = {'key': "D:7:Q", 'kind': "D", 'n': 7, 'weights': "Q", 'value': 3, 'status': "exact",
            'witness': [1, 1], 'engine_version': "1.0.0", 'ts': "2026-10-16T12:00:00+00:00"}
    record = CacheEntry.from_dict(data).record
    assert (record.value, record.node_count, record.elapsed_ms) == (3, 0, 0.0)
