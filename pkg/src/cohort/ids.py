"""Ordering of institutional person identifiers."""

from __future__ import annotations

from typing import Iterable


def _all_numeric(ids: list[str]) -> bool:
    return all(i.isdigit() for i in ids)


def sort_ids(ids: Iterable[str]) -> list[str]:
    """Numeric order when every id is a digit string, lexicographic otherwise."""
    ids = list(ids)
    if ids and _all_numeric(ids):
        return sorted(ids, key=lambda i: (int(i), i))
    return sorted(ids)


def earliest_id(ids: Iterable[str]) -> str:
    return sort_ids(ids)[0]
