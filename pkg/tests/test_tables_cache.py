from __future__ import annotations

import json

from wdist.cache import ResultCache
from wdist.tables import DistributionTable


def test_table_drops_zero_and_sorts():
    t = DistributionTable({5: 2, 1: 0, 3: 1}, key_name="weight")
    assert t.keys() == [3, 5]
    assert t[1] == 0 and 1 not in t
    assert t == DistributionTable({3: 1, 5: 2})
    assert t.total() == 3


def test_table_serialisation():
    t = DistributionTable({2: 10**30, 0: 1}, key_name="weight")
    data = json.loads(t.to_json({"p": 3}))
    assert data["p"] == 3
    assert data["rows"][1] == {"weight": 2, "freq": str(10**30)}
    assert t.to_csv(header=("weight", "frequency")).splitlines() == ["weight,frequency", "0,1", f"2,{10**30}"]


def test_table_diff():
    a = DistributionTable({1: 2, 2: 3})
    b = DistributionTable({1: 2, 3: 1})
    assert a.diff(b) == [(2, 3, 0), (3, 0, 1)]


def test_cache_roundtrip(tmp_path):
    cache = ResultCache(tmp_path)
    key = cache.key(command="x", p=3)
    assert cache.load(key) is None
    cache.store(key, {"b": 1, "a": [1, 2]})
    assert cache.load(key) == {"b": 1, "a": [1, 2]}
    assert list(cache.load(key)) == ["b", "a"]


def test_cache_key_is_order_independent():
    assert ResultCache.key(a=1, b=2) == ResultCache.key(b=2, a=1)
    assert ResultCache.key(a=1, b=2) != ResultCache.key(a=1, b=3)


def test_cache_detects_corruption(tmp_path):
    cache = ResultCache(tmp_path)
    key = cache.key(x=1)
    cache.store(key, {"v": 1})
    path = cache.path(key)
    path.write_text(path.read_text().replace('"v": 1', '"v": 2'))
    assert cache.load(key) is None
    assert not path.exists()


def test_disabled_cache(tmp_path):
    cache = ResultCache(tmp_path, enabled=False)
    cache.store("k", {"v": 1})
    assert cache.load("k") is None
    assert not any(tmp_path.iterdir())
