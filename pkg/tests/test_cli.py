from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from conftest import FIXTURES

from mgo.cli import main

GUIDELINE = str(FIXTURES / "otitis_externa.md")
TERMINOLOGY = str(FIXTURES / "otitis_terminology.tsv")
CONSULTATION = str(FIXTURES / "consultation_otitis.nt")
GOLDEN_MGO = str(FIXTURES / "golden" / "otitis_mgo.nt")
GOLDEN_PATIENT = str(FIXTURES / "golden" / "otitis_patient.nt")


@pytest.fixture()
def runner():
    return CliRunner()


def test_build_reproduces_the_golden_graph(runner, tmp_path, golden_mgo_text):
    out = tmp_path / "mgo.nt"
    result = runner.invoke(
        main,
        [
            "build",
            "--guideline", GUIDELINE,
            "--terminology", TERMINOLOGY,
            "--out", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    assert out.read_text(encoding="utf-8") == golden_mgo_text
    report = json.loads(result.output)
    assert report["partition_counts"] == {
        "PAO": 10,
        "PSO": 12,
        "POO": 14,
        "PDO": 1,
        "PTO": 18,
    }
    assert report["skipped_sentences"] == [20, 21]


def test_build_accepts_a_decision_log_and_heading_map(runner, tmp_path, golden_mgo_text):
    decisions = tmp_path / "decisions.jsonl"
    from mgo.curation import CandidateStatus, CurationDecisions, mapping_id

    log = CurationDecisions(decisions)
    log.apply(mapping_id("discharge", 1, 5), CandidateStatus.ACCEPTED, 19)
    out = tmp_path / "mgo.nt"
    result = runner.invoke(
        main,
        [
            "build",
            "--guideline", GUIDELINE,
            "--terminology", TERMINOLOGY,
            "--decisions", str(decisions),
            "--heading-map", str(FIXTURES / "heading_map.json"),
            "--out", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    text = out.read_text(encoding="utf-8")
    assert text != golden_mgo_text
    assert (
        "<urn:mgo:anat:externalAuditoryCanal> <urn:mgo:rel:hasSymptom> "
        "<urn:mgo:symp:fluidDrainage> ." in text
    )


def test_build_failure_exits_one(runner, tmp_path):
    bad = tmp_path / "guideline.md"
    bad.write_text("# Tennis Elbow\n\n## Symptoms\n\nPain.\n", encoding="utf-8")
    result = runner.invoke(
        main,
        [
            "build",
            "--guideline", str(bad),
            "--terminology", TERMINOLOGY,
            "--out", str(tmp_path / "mgo.nt"),
        ],
    )
    assert result.exit_code == 1
    assert "unknown condition 'Tennis Elbow'" in result.output


def test_missing_input_exits_two(runner, tmp_path):
    result = runner.invoke(
        main,
        [
            "build",
            "--guideline", str(tmp_path / "absent.md"),
            "--terminology", TERMINOLOGY,
            "--out", str(tmp_path / "mgo.nt"),
        ],
    )
    assert result.exit_code == 2


def test_validate_clean_graph_is_quiet(runner):
    result = runner.invoke(main, ["validate", "--graph", GOLDEN_MGO])
    assert result.exit_code == 0
    assert result.output == ""


def test_validate_reports_violations_as_json_lines(runner, tmp_path):
    broken = tmp_path / "broken.nt"
    lines = [
        line
        for line in open(GOLDEN_MGO, encoding="utf-8")
        if "<urn:mgo:rel:diagnosedWith>" not in line
    ]
    broken.write_text("".join(lines), encoding="utf-8")
    result = runner.invoke(main, ["validate", "--graph", str(broken)])
    assert result.exit_code == 1
    reported = [json.loads(line) for line in result.output.splitlines()]
    assert reported == [
        {
            "rule": "5",
            "elements": ["patient:patient"],
            "message": "No diagnosedWith edge from patient",
        }
    ]


def test_interpret_reproduces_the_golden_patient_graph(runner, tmp_path, golden_patient_text):
    out = tmp_path / "patient.nt"
    result = runner.invoke(
        main,
        [
            "interpret",
            "--mgo", GOLDEN_MGO,
            "--consultation", CONSULTATION,
            "--out", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    assert out.read_text(encoding="utf-8") == golden_patient_text
    summary = json.loads(result.output)
    assert summary == {
        "consultation_triples": 16,
        "patient_triples": 11,
        "reduction_ratio": "11/16",
    }


def test_interpret_rejects_foreign_vocabulary(runner, tmp_path):
    bad = tmp_path / "consultation.nt"
    bad.write_text(
        "<urn:mgo:anat:ear> <urn:mgo:rel:causes> <urn:mgo:symp:pain> .\n",
        encoding="utf-8",
    )
    result = runner.invoke(
        main,
        ["interpret", "--mgo", GOLDEN_MGO, "--consultation", str(bad), "--out", str(tmp_path / "p.nt")],
    )
    assert result.exit_code == 1
    assert "relations outside the vocabulary: causes" in result.output


def test_candidates_writes_the_queue(runner, tmp_path):
    out = tmp_path / "queue.jsonl"
    result = runner.invoke(
        main,
        [
            "candidates",
            "--guideline", GUIDELINE,
            "--terminology", TERMINOLOGY,
            "--out", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    assert result.output == "55 candidates, 5 pending\n"
    entries = [json.loads(line) for line in out.read_text(encoding="utf-8").splitlines()]
    assert len(entries) == 55
    assert {e["status"] for e in entries} == {"accepted", "pending"}


def test_export_turtle(runner):
    result = runner.invoke(main, ["export", "--graph", GOLDEN_MGO, "--format", "ttl"])
    assert result.exit_code == 0
    assert "@prefix anat: <urn:mgo:anat:> ." in result.output
    assert "anat:externalAuditoryCanal rel:isPartOf anat:ear ." in result.output


def test_export_json(runner):
    result = runner.invoke(main, ["export", "--graph", GOLDEN_MGO, "--format", "json"])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert set(payload) == {"nodes", "edges"}
    assert any(n["id"] == "patient:patient" for n in payload["nodes"])


def test_export_rejects_unknown_formats(runner):
    result = runner.invoke(main, ["export", "--graph", GOLDEN_MGO, "--format", "xml"])
    assert result.exit_code == 2
