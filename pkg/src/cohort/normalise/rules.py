"""Deterministic school-type classification over cleaned school names."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import yaml

from ..errors import InvalidConfig
from .text import DEFAULT_STOPWORDS, clean_text, match_tokens

STATE_NATIONAL = "STATE_NATIONAL"
STATE_PROVINCIAL = "STATE_PROVINCIAL"
PRIVATE_RELIGIOUS = "PRIVATE_RELIGIOUS"
PRIVATE_SECULAR = "PRIVATE_SECULAR"
UNKNOWN = "UNKNOWN"
DATA_MISSING = "DATA_MISSING"

SCHOOL_TYPES = (STATE_NATIONAL, STATE_PROVINCIAL, PRIVATE_RELIGIOUS, PRIVATE_SECULAR, UNKNOWN, DATA_MISSING)


@dataclass(frozen=True)
class SchoolTypeRule:
    rank: int
    target: str
    patterns: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if not self.patterns:
            raise InvalidConfig(f"rule rank {self.rank} has no patterns")
        if self.target not in SCHOOL_TYPES[:4]:
            raise InvalidConfig(f"rule rank {self.rank} targets {self.target!r}")

    def matches(self, tokens: list[str]) -> bool:
        for pat in self.patterns:
            k = len(pat)
            for i in range(len(tokens) - k + 1):
                if tuple(tokens[i:i + k]) == pat:
                    return True
        return False


def make_rule(rank: int, target: str, patterns) -> SchoolTypeRule:
    seqs = tuple(tuple(match_tokens(clean_text(p))) for p in patterns)
    return SchoolTypeRule(rank, target, tuple(s for s in seqs if s))


@dataclass(frozen=True)
class RuleSet:
    """Base rules, iteration-2 supplementary rules and the stopword list."""

    rules: tuple[SchoolTypeRule, ...]
    extra_rules: tuple[SchoolTypeRule, ...] = ()
    stopwords: frozenset[str] = DEFAULT_STOPWORDS
    version: str = "0"

    @property
    def all_rules(self) -> tuple[SchoolTypeRule, ...]:
        return self.rules + self.extra_rules


def classify_school_type(cleaned_name: str, rules) -> str:
    """First rule by rank with a whole-token pattern match; ``UNKNOWN`` otherwise."""
    tokens = match_tokens(cleaned_name)
    for rule in sorted(rules, key=lambda r: r.rank):
        if rule.matches(tokens):
            return rule.target
    return UNKNOWN


def _parse_rules(items, where: str) -> tuple[SchoolTypeRule, ...]:
    if not isinstance(items, list):
        raise InvalidConfig(f"{where} must be a list")
    try:
        rules = tuple(make_rule(int(it["rank"]), str(it["target"]), list(it["patterns"])) for it in items)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidConfig(f"malformed rule in {where}: {exc}") from exc
    return rules


def parse_rules(doc: dict) -> RuleSet:
    rules = _parse_rules(doc.get("rules", []), "rules")
    extra = _parse_rules(doc.get("extra_rules", []), "extra_rules")
    ranks = [r.rank for r in rules + extra]
    if len(ranks) != len(set(ranks)):
        raise InvalidConfig("rule ranks must be unique")
    stop = doc.get("stopwords")
    stopwords = frozenset(clean_text(w).strip(".") for w in stop) if stop else DEFAULT_STOPWORDS
    return RuleSet(rules, extra, stopwords, str(doc.get("version", "0")))


def load_rules(path: str | Path | None = None) -> RuleSet:
    if path is None:
        text = resources.files("cohort.data").joinpath("default_rules.yaml").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    doc = yaml.safe_load(text)
    if not isinstance(doc, dict):
        raise InvalidConfig("rules file must be a mapping")
    return parse_rules(doc)
