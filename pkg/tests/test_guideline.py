from __future__ import annotations

import pytest

from mgo.errors import ConfigError, ParseError
from mgo.guideline import (
    DEFAULT_HEADING_MAP,
    SectionKind,
    load_heading_map,
    parse_guideline,
)

from conftest import FIXTURES


def test_fixture_doc_structure(doc):
    assert doc.condition_name == "Otitis Externa"
    assert [s.kind for s in doc.sections] == [
        SectionKind.OTHER,
        SectionKind.SYMPTOMS,
        SectionKind.EXAMINATION,
        SectionKind.DIAGNOSIS,
        SectionKind.TREATMENT,
        SectionKind.OTHER,
    ]
    assert [s.heading for s in doc.sections][:2] == ["Background", "Symptoms"]


def test_sentence_indexes_are_global_and_contiguous(doc):
    sentences = list(doc.sentences())
    assert len(sentences) == 22
    assert [s.sentence_index for s in sentences] == list(range(22))
    for sentence in sentences:
        assert doc.sections[sentence.section_index].heading == doc.section_of(sentence).heading
        assert sentence in doc.section_of(sentence).sentences


def test_wrapped_lines_join_into_single_sentences(doc):
    symptom_texts = [s.text for s in doc.sections[1].sentences]
    assert (
        "Patients may report ear pain, ear itching, fluid drainage from the ear, "
        "and hearing loss." in symptom_texts
    )
    assert all("\n" not in text for text in symptom_texts)


def test_sentences_of_kind(doc):
    treatment = doc.sentences_of_kind(SectionKind.TREATMENT)
    assert len(treatment) == 8
    assert treatment[0].text.startswith("Ear cleaning")
    assert doc.sentences_of_kind(SectionKind.DIAGNOSIS)[0].text.startswith(
        "Otitis externa is diagnosed"
    )


def test_heading_match_is_case_insensitive(tmp_path):
    path = tmp_path / "doc.md"
    path.write_text(
        "# Demo\n\n## PHYSICAL EXAMINATION\n\nInspect the ear.\n", encoding="utf-8"
    )
    doc = parse_guideline(str(path))
    assert doc.sections[0].kind is SectionKind.EXAMINATION


def test_unknown_heading_becomes_other(tmp_path):
    path = tmp_path / "doc.md"
    path.write_text("# Demo\n\n## Folklore\n\nText here.\n", encoding="utf-8")
    assert parse_guideline(str(path)).sections[0].kind is SectionKind.OTHER


def test_preamble_before_first_heading_is_unnamed_other(tmp_path):
    path = tmp_path / "doc.md"
    path.write_text(
        "# Demo\n\nLead-in sentence.\n\n## Symptoms\n\nPain.\n", encoding="utf-8"
    )
    doc = parse_guideline(str(path))
    assert doc.sections[0].heading == ""
    assert doc.sections[0].kind is SectionKind.OTHER
    assert doc.sections[1].kind is SectionKind.SYMPTOMS


def test_bullets_split_into_separate_sentences(tmp_path):
    path = tmp_path / "doc.md"
    path.write_text(
        "# Demo\n\n## Symptoms\n\n- Ear pain\n- Itching at night\n", encoding="utf-8"
    )
    doc = parse_guideline(str(path))
    assert [s.text for s in doc.sections[0].sentences] == [
        "Ear pain",
        "Itching at night",
    ]


def test_parse_errors(tmp_path):
    no_title = tmp_path / "a.md"
    no_title.write_text("Just text without a title.\n", encoding="utf-8")
    with pytest.raises(ParseError, match="title"):
        parse_guideline(str(no_title))

    empty = tmp_path / "b.md"
    empty.write_text("\n\n", encoding="utf-8")
    with pytest.raises(ParseError, match="missing"):
        parse_guideline(str(empty))

    no_sections = tmp_path / "c.md"
    no_sections.write_text("# Demo\n\n", encoding="utf-8")
    with pytest.raises(ParseError, match="no sections"):
        parse_guideline(str(no_sections))

    second_title = tmp_path / "d.md"
    second_title.write_text("# Demo\n\n## Symptoms\n\nPain.\n\n# Again\n", encoding="utf-8")
    with pytest.raises(ParseError, match="second title"):
        parse_guideline(str(second_title))


def test_load_heading_map_round_trips_defaults():
    mapping = load_heading_map(str(FIXTURES / "heading_map.json"))
    assert mapping == dict(DEFAULT_HEADING_MAP)


def test_load_heading_map_errors(tmp_path):
    bad_json = tmp_path / "map.json"
    bad_json.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_heading_map(str(bad_json))

    not_object = tmp_path / "list.json"
    not_object.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigError, match="JSON object"):
        load_heading_map(str(not_object))

    bad_kind = tmp_path / "kind.json"
    bad_kind.write_text('{"symptoms": "Vibes"}', encoding="utf-8")
    with pytest.raises(ConfigError, match="unknown section kind"):
        load_heading_map(str(bad_kind))


def test_custom_heading_map_overrides_default(tmp_path):
    path = tmp_path / "doc.md"
    path.write_text("# Demo\n\n## Klachten\n\nPain.\n", encoding="utf-8")
    custom = {"klachten": SectionKind.SYMPTOMS}
    assert parse_guideline(str(path), custom).sections[0].kind is SectionKind.SYMPTOMS
    assert parse_guideline(str(path)).sections[0].kind is SectionKind.OTHER
