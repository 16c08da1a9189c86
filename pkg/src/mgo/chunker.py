"""Sentence splitting, phrase normalization and dictionary phrase extraction.

The extraction step is gazetteer-style: every token window of length 5 down
to 1 is normalized and looked up in the terminology snapshot, overlaps are
resolved longest-first then leftmost, and leftover non-stopword runs are kept
as unmatched phrases for the curation queue.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from typing import TYPE_CHECKING, Collection, Iterable

if TYPE_CHECKING:
    from .terminology import TerminologySnapshot

__all__ = [
    "Phrase",
    "Token",
    "split_sentences",
    "scrub",
    "normalize",
    "tokenize",
    "extract_noun_phrases",
    "load_wordlist",
    "DEFAULT_STOPWORDS",
    "DEFAULT_KEEP",
]

MAX_WINDOW = 5

_DETERMINERS = frozenset({"the", "a", "an"})

# Words whose final -s is meaningful and must survive singularization.
DEFAULT_KEEP = frozenset(
    {
        "otitis",
        "diabetes",
        "mellitus",
        "pus",
        "meatus",
        "tinnitus",
        "herpes",
        "lens",
        "scabies",
        "species",
    }
)

DEFAULT_STOPWORDS = frozenset(
    """
    the a an and or but nor of in on at by for with from to into onto after
    before during despite without within under over between through against
    about as if when while than then there here also not no nor both each
    every any some such other same own it its he she they them their his her
    who which what whose this that these those
    is are was were be been being has have had having may might can could
    should must will would shall do does did done
    report reports reported reporting present presents presented presenting
    occur occurs occurred occurring examine examines examined examining
    inspect inspects inspected check checks checked checking consider
    considers considered perform performs performed persist persists
    persisted persisting indicate indicates indicated develop develops
    developed note notes noted advise advises advised instruct instructs
    instructed prescribe prescribes prescribed recommend recommends
    recommended avoid avoids avoided start starts started begin begins began
    worsen worsens worsened show shows showed shown deserve deserves rule
    ruled rules out look looks looked see seen needed need needs
    associated touch touched touches chew chewing chews diagnose diagnosed
    diagnosing contain contains containing combine combined combines insert
    inserts inserted obstruct obstructs fail fails failed shut
    often usually commonly typically sometimes rarely first early late very
    slightly severe mild moderate chronic common uncommon extra proper
    properly also only more most less least new old possibly vulnerable
    affected
    sign signs state finding findings complaint complaints condition
    conditions view history attention cases case step steps policy symptom
    symptoms treatment treatments
    """.split()
)

_ABBREVIATIONS = frozenset({"pt.", "dr.", "e.g.", "i.e.", "etc.", "vs.", "ca.", "cf.", "approx."})

_SENTENCE_BREAK = re.compile(r"[.?!]+(?=\s|$)")
_TOKEN = re.compile(r"[0-9A-Za-z]+(?:['\-][0-9A-Za-z]+)*")


@dataclass(frozen=True, slots=True)
class Token:
    text: str
    start: int
    end: int


@dataclass(frozen=True, slots=True)
class Phrase:
    """One extracted phrase of a sentence.

    ``normalized`` is the fully normalized form used for dictionary lookup,
    ``scrubbed`` the case/punctuation-folded form before singularization
    (used to score exact descriptor matches). ``matched`` is False for
    fallback phrases that hit no dictionary entry.
    """

    surface: str
    normalized: str
    scrubbed: str
    start: int
    end: int
    matched: bool = True

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


def split_sentences(text: str) -> list[str]:
    """Split ``text`` into sentences on ., ? or ! followed by whitespace/end.

    A closed list of abbreviations ("pt.", "e.g.", ...) never ends a
    sentence. Terminal punctuation stays attached; blank results are dropped.
    """
    sentences: list[str] = []
    begin = 0
    for match in _SENTENCE_BREAK.finditer(text):
        if match.group() == "." and _ends_with_abbreviation(text, match.end()):
            continue
        chunk = text[begin : match.end()].strip()
        if chunk:
            sentences.append(chunk)
        begin = match.end()
    tail = text[begin:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def _ends_with_abbreviation(text: str, end: int) -> bool:
    head = text[:end]
    last = head.rsplit(None, 1)[-1] if head.split() else head
    return last.lower() in _ABBREVIATIONS


def scrub(text: str) -> str:
    """Fold case, trim punctuation, collapse whitespace, drop leading determiners."""
    words = []
    for raw in text.lower().split():
        word = raw.strip(string.punctuation)
        if word:
            words.append(word)
    while words and words[0] in _DETERMINERS:
        words.pop(0)
    return " ".join(words)


def _singularize(token: str, keep: Collection[str]) -> str:
    if token in keep:
        return token
    if len(token) > 4 and token.endswith("ies"):
        return token[:-3] + "y"
    if len(token) > 4 and token.endswith("ses"):
        return token[:-3] + "sis"
    if (
        len(token) > 3
        and token.endswith("s")
        and not token.endswith("ss")
        and not token.endswith("sis")
    ):
        return token[:-1]
    return token


def normalize(phrase: str, keep: Collection[str] | None = None) -> str:
    """Normalize a phrase for dictionary lookup.

    Lowercases, trims edge punctuation, collapses whitespace, strips leading
    determiners and singularizes the final token (-ies -> -y, -ses -> -sis,
    trailing -s dropped unless the token is on the keep list or ends in a
    meaningful -ss/-sis). Idempotent.
    """
    words = scrub(phrase).split()
    if not words:
        return ""
    words[-1] = _singularize(words[-1], DEFAULT_KEEP if keep is None else keep)
    return " ".join(words)


def tokenize(sentence: str) -> list[Token]:
    return [Token(m.group(), m.start(), m.end()) for m in _TOKEN.finditer(sentence)]


def load_wordlist(path: str) -> frozenset[str]:
    """Read a one-word-per-line UTF-8 word list; blank lines and # comments skipped."""
    words = set()
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            word = line.strip()
            if word and not word.startswith("#"):
                words.add(word.lower())
    return frozenset(words)


def extract_noun_phrases(
    sentence: str,
    snapshot: "TerminologySnapshot",
    stopwords: Iterable[str] | None = None,
) -> list[Phrase]:
    """Extract dictionary-matched and fallback phrases from one sentence.

    Candidate windows never start or end on a stopword. Overlapping
    dictionary matches are resolved longest-first, then leftmost, so each
    token belongs to at most one matched phrase. Tokens left uncovered form
    maximal non-stopword runs, returned as unmatched fallback phrases.
    """
    stop = DEFAULT_STOPWORDS if stopwords is None else frozenset(w.lower() for w in stopwords)
    tokens = tokenize(sentence)
    if not tokens:
        return []

    candidates: list[tuple[int, int, str, str]] = []
    for length in range(min(MAX_WINDOW, len(tokens)), 0, -1):
        for i in range(len(tokens) - length + 1):
            window = tokens[i : i + length]
            if window[0].text.lower() in stop or window[-1].text.lower() in stop:
                continue
            joined = " ".join(t.text for t in window)
            normalized = normalize(joined)
            if normalized and snapshot.lookup_term(normalized):
                candidates.append((length, i, normalized, scrub(joined)))

    taken: set[int] = set()
    phrases: list[Phrase] = []
    for length, i, normalized, scrubbed in sorted(candidates, key=lambda c: (-c[0], c[1])):
        covered = range(i, i + length)
        if any(j in taken for j in covered):
            continue
        taken.update(covered)
        first, last = tokens[i], tokens[i + length - 1]
        phrases.append(
            Phrase(
                surface=sentence[first.start : last.end],
                normalized=normalized,
                scrubbed=scrubbed,
                start=first.start,
                end=last.end,
            )
        )

    run: list[int] = []
    for j, token in enumerate(tokens):
        usable = j not in taken and token.text.lower() not in stop
        if usable:
            run.append(j)
        if run and (not usable or j == len(tokens) - 1):
            first, last = tokens[run[0]], tokens[run[-1]]
            joined = " ".join(tokens[k].text for k in run)
            phrases.append(
                Phrase(
                    surface=sentence[first.start : last.end],
                    normalized=normalize(joined),
                    scrubbed=scrub(joined),
                    start=first.start,
                    end=last.end,
                    matched=False,
                )
            )
            run = []

    phrases.sort(key=lambda p: (p.start, p.end))
    return phrases
