"""Deterministic text standardisation used for matching and classification."""

from __future__ import annotations

import re
import string
import unicodedata

DEFAULT_STOPWORDS = frozenset({"esc", "escuela", "colegio", "instituto"})

_PUNCT = string.punctuation + "°º´`¨"
_SPLIT = re.compile(r"[^\w.]+")


def _clean_once(s: str) -> str:
    s = unicodedata.normalize("NFD", s.lower())
    s = "".join(ch for ch in s if not unicodedata.combining(ch))
    return " ".join(s.split())


def clean_text(s: str | None) -> str:
    """Lower-case, strip accents and collapse whitespace.

    >>> clean_text("  SAN   Miguel de Tucumán ")
    'san miguel de tucuman'
    """
    if not s:
        return ""
    out = _clean_once(s)
    # A few code points only settle after a second pass (e.g. lower() that
    # yields a decomposable character); iterate to the fixed point.
    while True:
        again = _clean_once(out)
        if again == out:
            return out
        out = again


def strip_punct(token: str) -> str:
    return token.strip(_PUNCT)


def remove_stopwords(s: str, stopwords=DEFAULT_STOPWORDS) -> str:
    """Drop tokens whose punctuation-stripped form is a stopword."""
    return " ".join(t for t in s.split() if strip_punct(t) not in stopwords)


def match_tokens(s: str) -> list[str]:
    """Tokens for pattern matching: dotted abbreviations folded (``e.p.e.t.`` -> ``epet``)."""
    out = []
    for piece in _SPLIT.split(s):
        piece = piece.replace(".", "").replace("_", "")
        if piece:
            out.append(piece)
    return out


def is_abbreviated(label: str) -> bool:
    """True when any token of a cleaned label carries a period (``tuc.``, ``s.m.``)."""
    return any("." in t for t in label.split())
