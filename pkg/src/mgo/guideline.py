"""Sectioned guideline documents.

A document is a markdown-ish file: one ``# <condition>`` title line followed
by ``## <heading>`` sections. Headings map to section kinds through a heading
map (JSON object heading -> kind); unmapped headings become Other. Body text
under each heading is split into indexed sentences.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Iterator, Mapping

from .chunker import split_sentences
from .errors import ConfigError, ParseError

__all__ = [
    "SectionKind",
    "Sentence",
    "Section",
    "GuidelineDoc",
    "DEFAULT_HEADING_MAP",
    "load_heading_map",
    "parse_guideline",
]


class SectionKind(enum.Enum):
    SYMPTOMS = "Symptoms"
    EXAMINATION = "Examination"
    DIAGNOSIS = "Diagnosis"
    TREATMENT = "Treatment"
    OTHER = "Other"


# Headings commonly used by primary-care guidelines. Matching is
# case-insensitive; anything absent here is an Other section.
DEFAULT_HEADING_MAP: Mapping[str, SectionKind] = {
    "symptoms": SectionKind.SYMPTOMS,
    "signs and symptoms": SectionKind.SYMPTOMS,
    "clinical picture": SectionKind.SYMPTOMS,
    "examination": SectionKind.EXAMINATION,
    "physical examination": SectionKind.EXAMINATION,
    "diagnosis": SectionKind.DIAGNOSIS,
    "evaluation": SectionKind.DIAGNOSIS,
    "assessment": SectionKind.DIAGNOSIS,
    "treatment": SectionKind.TREATMENT,
    "treatment policy": SectionKind.TREATMENT,
    "therapy": SectionKind.TREATMENT,
    "management": SectionKind.TREATMENT,
}


@dataclass(frozen=True, slots=True)
class Sentence:
    text: str
    section_index: int
    sentence_index: int


@dataclass(frozen=True, slots=True)
class Section:
    heading: str
    kind: SectionKind
    sentences: tuple[Sentence, ...]


@dataclass(frozen=True, slots=True)
class GuidelineDoc:
    condition_name: str
    sections: tuple[Section, ...]

    def sentences(self) -> Iterator[Sentence]:
        for section in self.sections:
            yield from section.sentences

    def sentences_of_kind(self, kind: SectionKind) -> list[Sentence]:
        return [s for sec in self.sections if sec.kind is kind for s in sec.sentences]

    def section_of(self, sentence: Sentence) -> Section:
        return self.sections[sentence.section_index]


def load_heading_map(path: str) -> dict[str, SectionKind]:
    """Load a JSON heading map; values must be section kind tokens."""
    try:
        with open(path, encoding="utf-8") as handle:
            raw = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"heading map {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"heading map {path} must be a JSON object")
    mapping: dict[str, SectionKind] = {}
    for heading, token in raw.items():
        try:
            mapping[heading.strip().lower()] = SectionKind(token)
        except ValueError:
            raise ConfigError(
                f"heading map {path}: unknown section kind {token!r} for {heading!r}"
            ) from None
    return mapping


def parse_guideline(
    path: str, heading_map: Mapping[str, SectionKind] | None = None
) -> GuidelineDoc:
    """Parse a guideline file into a titled, sectioned, sentence-indexed doc.

    Text between the title and the first heading becomes an unnamed Other
    section. A document without a title or without any section is rejected.
    """
    mapping = DEFAULT_HEADING_MAP if heading_map is None else heading_map
    with open(path, encoding="utf-8") as handle:
        lines = handle.read().splitlines()

    condition_name: str | None = None
    title_line = 0
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if line.startswith("# ") and not line.startswith("## "):
            condition_name = line[2:].strip()
            title_line = line_no
            break
        raise ParseError("expected a '# <condition>' title line", path, line_no)
    if condition_name is None:
        raise ParseError("missing '# <condition>' title line", path, 1)
    if not condition_name:
        raise ParseError("empty condition name in title", path, title_line)

    raw_sections: list[tuple[str, list[str]]] = []
    for line_no, line in enumerate(lines[title_line:], start=title_line + 1):
        if line.startswith("## "):
            raw_sections.append((line[3:].strip(), []))
            continue
        if line.startswith("# ") and not line.startswith("## "):
            raise ParseError("unexpected second title line", path, line_no)
        if line.strip():
            if not raw_sections:
                raw_sections.append(("", []))
            raw_sections[-1][1].append(line)

    if not raw_sections:
        raise ParseError("document has no sections", path, title_line)

    sections: list[Section] = []
    sentence_index = 0
    for section_index, (heading, body) in enumerate(raw_sections):
        kind = mapping.get(heading.strip().lower(), SectionKind.OTHER)
        sentences: list[Sentence] = []
        for block in _blocks(body):
            for text in split_sentences(block):
                sentences.append(Sentence(text, section_index, sentence_index))
                sentence_index += 1
        sections.append(Section(heading, kind, tuple(sentences)))

    return GuidelineDoc(condition_name=condition_name, sections=tuple(sections))


def _blocks(body: list[str]) -> list[str]:
    """Join body lines into sentence-splittable blocks; bullets stay separate."""
    blocks: list[str] = []
    current: list[str] = []
    for line in body:
        stripped = line.strip()
        if not stripped:
            if current:
                blocks.append(" ".join(current))
                current = []
            continue
        if stripped.startswith(("- ", "* ")):
            if current:
                blocks.append(" ".join(current))
                current = []
            blocks.append(stripped[2:].strip())
            continue
        current.append(stripped)
    if current:
        blocks.append(" ".join(current))
    return blocks
