"""N1b identity resolution: conflict audit, canonical ids and the alias table."""

from __future__ import annotations

import math
import unicodedata
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np

from .census import consolidate_persons
from .errors import UnmappedId
from .ids import earliest_id, sort_ids
from .normalise.text import clean_text
from .records import CensalRecord, RawStudentRecord, ResolvedRecord, is_missing

DNI_DUPLICATE = "DNI_DUPLICATE"
ID_COLLISION = "ID_COLLISION"
NAME_BIRTH_MATCH = "NAME_BIRTH_MATCH"
NONE = "NONE"

AUTO_MERGED = "AUTO_MERGED"
AUTO_UNIQUE = "AUTO_UNIQUE"
NEEDS_REVIEW = "NEEDS_REVIEW"

DEFAULT_THRESHOLD = 0.80


# -- edit distance ------------------------------------------------------------

def char_units(s: str) -> list[str]:
    """Split into user-perceived characters: a base code point plus its combining marks."""
    units: list[str] = []
    for ch in s:
        if units and unicodedata.category(ch).startswith("M"):
            units[-1] += ch
        else:
            units.append(ch)
    return units


def edit_distance(a, b, max_dist: int | None = None) -> int:
    """Unit-cost Levenshtein distance between two sequences.

    With ``max_dist`` the computation stops early and returns ``max_dist + 1``
    as soon as the distance is known to exceed it; results up to ``max_dist``
    are exact.
    """
    if len(a) < len(b):
        a, b = b, a
    la, lb = len(a), len(b)
    if max_dist is not None and la - lb > max_dist:
        return max_dist + 1
    if lb == 0:
        return la
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        cur = [i] + [0] * lb
        ai = a[i - 1]
        row_min = i
        for j in range(1, lb + 1):
            cost = 0 if ai == b[j - 1] else 1
            v = prev[j - 1] + cost
            if prev[j] + 1 < v:
                v = prev[j] + 1
            if cur[j - 1] + 1 < v:
                v = cur[j - 1] + 1
            cur[j] = v
            if v < row_min:
                row_min = v
        if max_dist is not None and row_min > max_dist:
            return max_dist + 1
        prev = cur
    d = prev[lb]
    if max_dist is not None and d > max_dist:
        return max_dist + 1
    return d


def levenshtein_similarity(a: str, b: str) -> float:
    """``1 - d(a, b) / max(|a|, |b|)`` over characters; two empty strings give 1."""
    ua, ub = char_units(a), char_units(b)
    longest = max(len(ua), len(ub))
    if longest == 0:
        return 1.0
    return 1.0 - edit_distance(ua, ub) / longest


def _similar_above(ua, ub, threshold: float) -> float | None:
    """Similarity if it exceeds ``threshold``, else ``None`` (bounded computation)."""
    longest = max(len(ua), len(ub))
    if longest == 0:
        return 1.0 if 1.0 > threshold else None
    bound = math.ceil((1.0 - threshold) * longest) + 1
    d = edit_distance(ua, ub, bound)
    if d > bound:
        return None
    sim = 1.0 - d / longest
    return sim if sim > threshold else None


# -- audit ----------------------------------------------------------------------

@dataclass(frozen=True)
class NameKey:
    normalised_name: str
    birth_year: int | None


@dataclass(frozen=True)
class Evidence:
    id_a: str
    id_b: str
    similarity: float
    kind: str
    shared_key: str

    def render(self) -> str:
        return f"{self.kind}:{self.id_a}~{self.id_b}:{self.similarity:.4f}:{self.shared_key}"


@dataclass(frozen=True)
class ConflictCluster:
    member_ids: tuple[str, ...]
    kind: str
    evidence: tuple[Evidence, ...] = ()

    @property
    def edge_kinds(self) -> set[str]:
        return {e.kind for e in self.evidence}


@dataclass(frozen=True)
class AliasEntry:
    person_id_original: str
    person_id_canonical: str
    resolution_status: str
    evidence_summary: str = ""


def name_key(rec: RawStudentRecord) -> NameKey:
    return NameKey(clean_text(rec.full_name or ""), rec.birth_year)


def _name_sim(a: RawStudentRecord, b: RawStudentRecord) -> float:
    if is_missing(a.full_name) or is_missing(b.full_name):
        return 0.0
    return levenshtein_similarity(clean_text(a.full_name), clean_text(b.full_name))


class _UnionFind:
    def __init__(self, items: Iterable[str]):
        self.parent = {i: i for i in items}

    def find(self, x: str) -> str:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _dni_edges(records, threshold) -> list[Evidence]:
    by_doc: dict[str, list[CensalRecord]] = defaultdict(list)
    for r in records:
        if r.national_doc:
            by_doc[r.national_doc].append(r)
    edges = []
    for doc in sorted(by_doc):
        group = by_doc[doc]
        if len({r.person_id_original for r in group}) < 2:
            continue
        group = sorted(group, key=lambda r: sort_ids([r.person_id_original]))
        for a, b in combinations(group, 2):
            if a.person_id_original == b.person_id_original:
                continue
            edges.append(Evidence(a.person_id_original, b.person_id_original,
                                  _name_sim(a, b), DNI_DUPLICATE, f"national_doc={doc}"))
    return edges


def _collision_edges(raw_rows, threshold) -> list[Evidence]:
    by_id: dict[str, list[RawStudentRecord]] = defaultdict(list)
    for r in raw_rows:
        by_id[r.person_id_original].append(r)
    edges = []
    for pid in sort_ids(by_id):
        rows = by_id[pid]
        if len(rows) < 2:
            continue
        docs = {r.national_doc for r in rows if r.national_doc}
        worst = 1.0
        for a, b in combinations(rows, 2):
            if a.full_name and b.full_name:
                worst = min(worst, _name_sim(a, b))
        if len(docs) > 1:
            edges.append(Evidence(pid, pid, worst, ID_COLLISION,
                                  "national_doc in {" + ",".join(sorted(docs)) + "}"))
        elif worst < threshold:
            edges.append(Evidence(pid, pid, worst, ID_COLLISION, "names differ under one id"))
    return edges


class NamePack:
    """A block of names packed into integer matrices for vectorised edit distance.

    Units are mapped to integer codes through a shared ``vocab`` so that two
    packs built with the same vocabulary compare consistently.
    """

    BUCKETS = 64

    def __init__(self, names: list[list[str]], vocab: dict[str, int] | None = None):
        self.vocab = vocab if vocab is not None else {}
        self.lengths = np.array([len(n) for n in names], dtype=np.int64)
        width = int(self.lengths.max()) if len(names) else 0
        self.codes = np.full((len(names), width), -1, dtype=np.int64)
        for k, units in enumerate(names):
            self.codes[k, :len(units)] = self.encode(units)
        self.hist = np.zeros((len(names), self.BUCKETS), dtype=np.int64)
        valid = self.codes >= 0
        rows = np.nonzero(valid)[0]
        np.add.at(self.hist, (rows, self.codes[valid] % self.BUCKETS), 1)

    def encode(self, units: list[str]) -> np.ndarray:
        return np.array([self.vocab.setdefault(u, len(self.vocab)) for u in units], dtype=np.int64)

    def lower_bound(self, units: list[str]) -> np.ndarray:
        """Per-row lower bound on the edit distance (length gap and bag distance)."""
        q = np.zeros(self.BUCKETS, dtype=np.int64)
        np.add.at(q, self.encode(units) % self.BUCKETS, 1)
        diff = self.hist - q
        bag = np.maximum(np.clip(diff, 0, None).sum(axis=1), np.clip(-diff, 0, None).sum(axis=1))
        return np.maximum(bag, np.abs(self.lengths - len(units)))

    def distances(self, units: list[str], rows: np.ndarray) -> np.ndarray:
        """Exact Levenshtein distances from ``units`` to the selected rows."""
        rows = np.asarray(rows, dtype=np.int64)
        if len(rows) == 0:
            return np.zeros(0, dtype=np.int64)
        codes = self.codes[rows]
        width = codes.shape[1]
        j = np.arange(width + 1)
        prev = np.broadcast_to(j, (len(rows), width + 1)).copy()
        for i, u in enumerate(self.encode(units), start=1):
            x = np.empty_like(prev)
            x[:, 0] = i
            x[:, 1:] = np.minimum(prev[:, :-1] + (codes != u), prev[:, 1:] + 1)
            # cur[j] = min(x[j], cur[j-1] + 1), solved as a running minimum.
            prev = j + np.minimum.accumulate(x - j, axis=1)
        return prev[np.arange(len(rows)), self.lengths[rows]]


def _name_birth_edges(records, threshold, blocking: bool) -> list[Evidence]:
    keyed = []
    for r in records:
        key = name_key(r)
        if key.birth_year is None or not key.normalised_name:
            continue
        keyed.append((r, key.birth_year, char_units(key.normalised_name)))

    edges = []
    if not blocking:
        # Reference path: every pair, scalar distance, no filters.
        for (ra, ya, ua), (rb, yb, ub) in combinations(keyed, 2):
            if ya != yb or ra.person_id_original == rb.person_id_original:
                continue
            if ra.national_doc and rb.national_doc:
                continue
            sim = levenshtein_similarity("".join(ua), "".join(ub))
            if sim > threshold:
                a, b = sort_ids([ra.person_id_original, rb.person_id_original])
                edges.append(Evidence(a, b, sim, NAME_BIRTH_MATCH, f"birth_year={ya}"))
        return sorted(set(edges), key=lambda e: (e.id_a, e.id_b))

    blocks: dict[int, list] = defaultdict(list)
    for item in keyed:
        blocks[item[1]].append(item)
    vocab: dict[str, int] = {}
    for year in sorted(blocks):
        block = blocks[year]
        # A name-birth link needs at least one side without a document, so
        # only undocumented records drive the comparisons.
        drivers = [k for k, it in enumerate(block) if not it[0].national_doc]
        if not drivers:
            continue
        pack = NamePack([it[2] for it in block], vocab)
        ids = [it[0].person_id_original for it in block]
        for k in drivers:
            ra, _, ua = block[k]
            longest = np.maximum(pack.lengths, len(ua))
            bound = pack.lower_bound(ua)
            keep = 1.0 - bound / np.maximum(longest, 1) > threshold
            keep[k] = False
            rows = np.nonzero(keep)[0]
            rows = rows[[ids[r] != ra.person_id_original for r in rows]] if len(rows) else rows
            if len(rows) == 0:
                continue
            dist = pack.distances(ua, rows)
            for r, d in zip(rows.tolist(), dist.tolist()):
                sim = 1.0 - d / int(longest[r])
                if sim > threshold:
                    a, b = sort_ids([ra.person_id_original, ids[r]])
                    edges.append(Evidence(a, b, sim, NAME_BIRTH_MATCH, f"birth_year={year}"))
    return sorted(set(edges), key=lambda e: (e.id_a, e.id_b))


def audit_identities(
    records: list[CensalRecord],
    threshold: float = DEFAULT_THRESHOLD,
    raw_rows: list[RawStudentRecord] | None = None,
    suppress: Iterable[Iterable[str]] = (),
    blocking: bool = True,
) -> list[ConflictCluster]:
    """Group person ids into conflict clusters (connected components).

    ``raw_rows`` are the pre-consolidation rows, needed to spot one id carrying
    two identities. Pairs inside any member set of ``suppress`` (clusters
    already queued for review) are not raised again.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    ids = sort_ids({r.person_id_original for r in records})
    edges = _dni_edges(records, threshold) + _name_birth_edges(records, threshold, blocking)
    if raw_rows is not None:
        edges += _collision_edges(raw_rows, threshold)

    group_of: dict[str, int] = {}
    for n, members in enumerate(suppress):
        for m in members:
            group_of[m] = n
    if group_of:
        edges = [e for e in edges
                 if not (e.id_a in group_of and group_of.get(e.id_b) == group_of[e.id_a])]

    uf = _UnionFind(ids)
    for e in edges:
        if e.id_a in uf.parent and e.id_b in uf.parent:
            uf.union(e.id_a, e.id_b)
    members: dict[str, list[str]] = defaultdict(list)
    for i in ids:
        members[uf.find(i)].append(i)
    evidence: dict[str, list[Evidence]] = defaultdict(list)
    for e in edges:
        if e.id_a in uf.parent:
            evidence[uf.find(e.id_a)].append(e)

    clusters = []
    for root, mem in members.items():
        ev = tuple(sorted(evidence.get(root, ()), key=lambda e: (e.kind, e.id_a, e.id_b, e.shared_key)))
        kinds = {e.kind for e in ev}
        if ID_COLLISION in kinds:
            kind = ID_COLLISION
        elif DNI_DUPLICATE in kinds:
            kind = DNI_DUPLICATE
        elif NAME_BIRTH_MATCH in kinds:
            kind = NAME_BIRTH_MATCH
        else:
            kind = NONE
        clusters.append(ConflictCluster(tuple(sort_ids(mem)), kind, ev))
    order = {pid: n for n, pid in enumerate(ids)}
    clusters.sort(key=lambda c: order[c.member_ids[0]])
    return clusters


# -- resolution -------------------------------------------------------------------

def _is_clean_dni_cluster(cluster: ConflictCluster, threshold: float) -> bool:
    if cluster.edge_kinds != {DNI_DUPLICATE}:
        return False
    docs = {e.shared_key for e in cluster.evidence}
    if len(docs) != 1:
        return False
    pairs = {(e.id_a, e.id_b) for e in cluster.evidence} | {(e.id_b, e.id_a) for e in cluster.evidence}
    for a, b in combinations(cluster.member_ids, 2):
        if (a, b) not in pairs:
            return False
    return all(e.similarity > threshold for e in cluster.evidence)


def _summary(cluster: ConflictCluster) -> str:
    if not cluster.evidence:
        return "no conflicts"
    sims = [e.similarity for e in cluster.evidence if e.id_a != e.id_b]
    parts = [f"{cluster.kind} cluster of {len(cluster.member_ids)}"]
    keys = sorted({e.shared_key for e in cluster.evidence})
    parts.append("; ".join(keys[:3]) + ("; ..." if len(keys) > 3 else ""))
    if sims:
        parts.append(f"min name similarity {min(sims):.4f}")
    return "; ".join(parts)


def resolve_canonical(clusters: list[ConflictCluster], threshold: float = DEFAULT_THRESHOLD) -> list[AliasEntry]:
    """Conservative policy: only clean same-document clusters are merged."""
    entries = []
    for c in clusters:
        summary = _summary(c)
        if c.kind == NONE:
            entries += [AliasEntry(m, m, AUTO_UNIQUE, summary) for m in c.member_ids]
        elif len(c.member_ids) >= 2 and _is_clean_dni_cluster(c, threshold):
            canonical = earliest_id(c.member_ids)
            entries += [AliasEntry(m, canonical, AUTO_MERGED, summary) for m in c.member_ids]
        else:
            entries += [AliasEntry(m, m, NEEDS_REVIEW, summary) for m in c.member_ids]
    return entries


def apply_aliases(records: list[CensalRecord], aliases: list[AliasEntry]) -> list[ResolvedRecord]:
    table = {a.person_id_original: a for a in aliases}
    out = []
    for r in records:
        entry = table.get(r.person_id_original)
        if entry is None:
            raise UnmappedId(f"person id {r.person_id_original!r} is not in the alias table")
        out.append(ResolvedRecord(
            row_number=r.row_number, raw=r.raw, auxiliary_texts=r.auxiliary_texts,
            birth_date=r.birth_date, intake_date=r.intake_date, non_null_count=r.non_null_count,
            person_id_canonical=entry.person_id_canonical,
            resolution_status=entry.resolution_status,
        ))
    return out


def review_queue(clusters: list[ConflictCluster], aliases: list[AliasEntry]) -> list[ConflictCluster]:
    status = {a.person_id_original: a.resolution_status for a in aliases}
    return [c for c in clusters if status.get(c.member_ids[0]) == NEEDS_REVIEW]


def regroup_by_canonical(resolved: list[ResolvedRecord]) -> list[CensalRecord]:
    """Collapse resolved rows to one record per canonical id, re-keyed on it."""
    rekeyed = [
        CensalRecord(
            row_number=r.row_number, raw={**r.raw, "person_id": r.person_id_canonical},
            auxiliary_texts=r.auxiliary_texts, birth_date=r.birth_date,
            intake_date=r.intake_date, non_null_count=r.non_null_count,
        )
        for r in resolved
    ]
    selected, _ = consolidate_persons(rekeyed)
    return selected
