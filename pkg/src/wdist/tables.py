"""Frequency tables with exact integer counts and stable serialisation."""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Callable, Iterable, Mapping
from typing import Any


def _default_label(key) -> Any:
    if hasattr(key, "label"):
        return key.label
    if isinstance(key, tuple):
        return list(key)
    return key


def _default_sort(key):
    if hasattr(key, "sort_key"):
        return key.sort_key
    return key


class DistributionTable:
    """Sorted map from a key (rank, sign class, sum class, weight) to a count.

    Keys with a zero count are dropped, so two tables compare equal exactly
    when they agree on every key with a positive count.
    """

    def __init__(self, counts: Mapping | Iterable = (), key_name: str = "key"):
        self.key_name = key_name
        self._counts: dict = {}
        items = counts.items() if isinstance(counts, Mapping) else counts
        for key, freq in items:
            self.add(key, freq)

    def add(self, key, freq: int) -> None:
        freq = int(freq)
        total = self._counts.get(key, 0) + freq
        if total:
            self._counts[key] = total
        else:
            self._counts.pop(key, None)

    def __getitem__(self, key) -> int:
        return self._counts.get(key, 0)

    def __contains__(self, key) -> bool:
        return key in self._counts

    def __len__(self) -> int:
        return len(self._counts)

    def keys(self) -> list:
        return sorted(self._counts, key=_default_sort)

    def items(self) -> list[tuple[Any, int]]:
        return [(k, self._counts[k]) for k in self.keys()]

    def __iter__(self):
        return iter(self.keys())

    def total(self) -> int:
        return sum(self._counts.values())

    def as_dict(self) -> dict:
        return dict(self.items())

    def __eq__(self, other) -> bool:
        if isinstance(other, DistributionTable):
            return self._counts == other._counts
        if isinstance(other, Mapping):
            return self == DistributionTable(other)
        return NotImplemented

    def diff(self, other: DistributionTable) -> list[tuple[Any, int, int]]:
        """Every key where the two tables disagree, with both counts."""
        keys = sorted(set(self._counts) | set(other._counts), key=_default_sort)
        return [(k, self[k], other[k]) for k in keys if self[k] != other[k]]

    def map_keys(self, fn: Callable, key_name: str | None = None) -> DistributionTable:
        out = DistributionTable(key_name=key_name or self.key_name)
        for k, v in self._counts.items():
            out.add(fn(k), v)
        return out

    def rows(self, label: Callable = _default_label) -> list[dict]:
        return [{self.key_name: label(k), "freq": str(v)} for k, v in self.items()]

    def to_json(self, meta: Mapping | None = None, label: Callable = _default_label) -> str:
        body = dict(meta or {})
        body["rows"] = self.rows(label)
        return json.dumps(body, indent=2)

    def to_csv(self, label: Callable = _default_label, header: tuple[str, str] | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header or (self.key_name, "frequency"))
        for k, v in self.items():
            lab = label(k)
            w.writerow([lab if not isinstance(lab, list) else " ".join(map(str, lab)), str(v)])
        return buf.getvalue()

    def __repr__(self) -> str:
        inner = ", ".join(f"{_default_label(k)!r}: {v}" for k, v in self.items())
        return f"DistributionTable({self.key_name}; {inner})"
