"""Candidate phrase-to-concept mappings and the curator decision log.

Extraction alone cannot settle every phrase: some match several concepts,
some match none, and general nouns should be dropped entirely. Each
extracted phrase therefore becomes a reviewable candidate with scored
concept suggestions. Human verdicts land in an append-only JSON-lines log
that replays deterministically.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Iterable

from .chunker import Phrase, extract_noun_phrases, normalize
from .errors import NotFoundError, PreconditionError, StateError
from .guideline import GuidelineDoc, SectionKind
from .terminology import TerminologySnapshot

__all__ = [
    "CandidateStatus",
    "CandidateConcept",
    "CandidateMapping",
    "Decision",
    "CurationDecisions",
    "mapping_id",
    "score_candidates",
    "resolve_automatically",
    "enqueue_candidates",
    "apply_decision",
    "with_decisions",
]

SCORE_EXACT = 1.0  # descriptor matches the scrubbed phrase verbatim
SCORE_NORMALIZED = 0.8  # match appears only after singularization
SCORE_SUBSET = 0.5  # all phrase tokens occur in some descriptor


class CandidateStatus(Enum):
    PENDING = "pending"
    ACCEPTED = "accepted"
    REJECTED = "rejected"


@dataclass(frozen=True, slots=True)
class CandidateConcept:
    concept: int
    kind: str
    score: float
    term: str


@dataclass(frozen=True, slots=True)
class CandidateMapping:
    id: str
    phrase: Phrase
    sentence_text: str
    section_index: int
    sentence_index: int
    section_kind: SectionKind
    candidates: tuple[CandidateConcept, ...]
    status: CandidateStatus = CandidateStatus.PENDING
    concept: int | None = None

    def to_payload(self) -> dict:
        return {
            "id": self.id,
            "surface": self.phrase.surface,
            "normalized": self.phrase.normalized,
            "span": list(self.phrase.span),
            "sentence": self.sentence_text,
            "section_index": self.section_index,
            "sentence_index": self.sentence_index,
            "section_kind": self.section_kind.value,
            "matched": self.phrase.matched,
            "candidates": [
                {"concept": c.concept, "kind": c.kind, "score": c.score, "term": c.term}
                for c in self.candidates
            ],
            "status": self.status.value,
            "concept": self.concept,
        }


def mapping_id(normalized: str, section_index: int, sentence_index: int) -> str:
    """Stable id for one phrase occurrence: hash of the normalized form and
    its sentence reference."""
    key = f"{normalized}|{section_index}|{sentence_index}"
    return hashlib.sha256(key.encode("utf-8")).hexdigest()[:16]


def score_candidates(
    phrase: Phrase, snapshot: TerminologySnapshot
) -> tuple[CandidateConcept, ...]:
    """Scored concept suggestions, best first.

    Exact descriptor matches score 1.0, singularized-only matches 0.8. The
    0.5 token-subset tier is consulted only when the stronger tiers are
    empty, so weak suggestions never dilute a clear match.
    """
    scored: list[CandidateConcept] = []
    exact = snapshot.exact_term_ids(phrase.scrubbed)
    for cid in exact:
        concept = snapshot.concept(cid)
        scored.append(
            CandidateConcept(cid, concept.kind.value, SCORE_EXACT, concept.preferred_term)
        )
    for cid in snapshot.lookup_term(phrase.normalized):
        if cid in exact:
            continue
        concept = snapshot.concept(cid)
        scored.append(
            CandidateConcept(cid, concept.kind.value, SCORE_NORMALIZED, concept.preferred_term)
        )
    if not scored:
        tokens = set(phrase.normalized.split())
        if tokens:
            for concept in snapshot.concepts.values():
                if any(
                    tokens <= set(normalize(d).split()) for d in concept.descriptors()
                ):
                    scored.append(
                        CandidateConcept(
                            concept.id, concept.kind.value, SCORE_SUBSET, concept.preferred_term
                        )
                    )
    scored.sort(key=lambda c: (-c.score, c.concept))
    return tuple(scored)


def resolve_automatically(phrase: Phrase, snapshot: TerminologySnapshot) -> int | None:
    """The concept a phrase maps to without human help: a unique exact match."""
    exact = snapshot.exact_term_ids(phrase.scrubbed)
    if len(exact) == 1:
        return exact[0]
    return None


def enqueue_candidates(
    doc: GuidelineDoc,
    snapshot: TerminologySnapshot,
    stopwords: Iterable[str] | None = None,
) -> list[CandidateMapping]:
    """Every extracted phrase of the document as a candidate mapping.

    Unique exact matches arrive pre-accepted; everything else (ambiguous,
    weak, or unmatched) is pending. One entry per (normalized phrase,
    sentence); repeats keep the first occurrence.
    """
    queue: list[CandidateMapping] = []
    seen: set[str] = set()
    for sentence in doc.sentences():
        for phrase in extract_noun_phrases(sentence.text, snapshot, stopwords):
            mid = mapping_id(phrase.normalized, sentence.section_index, sentence.sentence_index)
            if mid in seen:
                continue
            seen.add(mid)
            candidates = score_candidates(phrase, snapshot)
            auto = resolve_automatically(phrase, snapshot)
            status = CandidateStatus.ACCEPTED if auto is not None else CandidateStatus.PENDING
            section = doc.sections[sentence.section_index]
            queue.append(
                CandidateMapping(
                    id=mid,
                    phrase=phrase,
                    sentence_text=sentence.text,
                    section_index=sentence.section_index,
                    sentence_index=sentence.sentence_index,
                    section_kind=section.kind,
                    candidates=candidates,
                    status=status,
                    concept=auto,
                )
            )
    return queue


@dataclass(frozen=True, slots=True)
class Decision:
    status: CandidateStatus
    concept: int | None


class CurationDecisions:
    """Append-only decision log; the latest entry per mapping id wins.

    Every accepted mutation is flushed and fsynced before apply() returns,
    so an acknowledged decision survives a crash. Re-applying the current
    effective state is a no-op and appends nothing.
    """

    def __init__(self, path: str | os.PathLike | None = None) -> None:
        self.path = os.fspath(path) if path is not None else None
        self._entries: list[dict] = []
        self._effective: dict[str, Decision] = {}

    @classmethod
    def load(cls, path: str | os.PathLike) -> "CurationDecisions":
        decisions = cls(path)
        if not os.path.exists(decisions.path):
            return decisions
        with open(decisions.path, "r", encoding="utf-8") as handle:
            for line_no, raw in enumerate(handle, start=1):
                line = raw.strip()
                if not line:
                    continue
                try:
                    entry = json.loads(line)
                    rev = entry["rev"]
                    mid = entry["id"]
                    status = CandidateStatus(entry["status"])
                    concept = entry["concept"]
                except (ValueError, KeyError, TypeError):
                    raise StateError(
                        f"{decisions.path}:{line_no}: unreadable decision log entry; "
                        "remove the damaged line (and any after it) to recover"
                    ) from None
                if status is CandidateStatus.PENDING:
                    raise StateError(
                        f"{decisions.path}:{line_no}: decision log entries must be "
                        "accepted or rejected; remove the damaged line to recover"
                    )
                if rev != len(decisions._entries) + 1:
                    raise StateError(
                        f"{decisions.path}:{line_no}: revision gap in decision log; "
                        "remove the damaged line (and any after it) to recover"
                    )
                decisions._entries.append(entry)
                decisions._effective[mid] = Decision(status, concept)
        return decisions

    @property
    def revision(self) -> int:
        return len(self._entries)

    def effective(self) -> dict[str, Decision]:
        return dict(self._effective)

    def apply(
        self, mapping_id: str, status: CandidateStatus, concept: int | None = None
    ) -> bool:
        """Record one verdict. Returns False when it matches the current state."""
        if status is CandidateStatus.PENDING:
            raise PreconditionError("a decision must accept or reject, not defer")
        if status is CandidateStatus.REJECTED and concept is not None:
            raise PreconditionError("a rejection cannot carry a concept")
        decision = Decision(status, concept)
        if self._effective.get(mapping_id) == decision:
            return False
        entry = {
            "rev": self.revision + 1,
            "id": mapping_id,
            "status": status.value,
            "concept": concept,
            "ts": datetime.now(timezone.utc).isoformat(),
        }
        if self.path is not None:
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(json.dumps(entry) + "\n")
                handle.flush()
                os.fsync(handle.fileno())
        self._entries.append(entry)
        self._effective[mapping_id] = decision
        return True


def apply_decision(
    decisions: CurationDecisions,
    candidates: Iterable[CandidateMapping],
    mapping_id: str,
    status: CandidateStatus,
    concept: int | None = None,
) -> CurationDecisions:
    """Validate the id against the candidate queue, then record the verdict."""
    if not any(c.id == mapping_id for c in candidates):
        raise NotFoundError(f"no candidate mapping with id {mapping_id}")
    decisions.apply(mapping_id, status, concept)
    return decisions


def with_decisions(
    candidates: Iterable[CandidateMapping], decisions: CurationDecisions
) -> list[CandidateMapping]:
    """Candidates with logged verdicts overriding their automatic status."""
    effective = decisions.effective()
    merged: list[CandidateMapping] = []
    for candidate in candidates:
        decision = effective.get(candidate.id)
        if decision is None:
            merged.append(candidate)
        else:
            merged.append(
                replace(candidate, status=decision.status, concept=decision.concept)
            )
    return merged
