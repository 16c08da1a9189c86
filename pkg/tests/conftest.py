from __future__ import annotations

from pathlib import Path

import pytest

from mgo.guideline import GuidelineDoc, parse_guideline
from mgo.terminology import TerminologySnapshot, load_snapshot

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def snapshot() -> TerminologySnapshot:
    return load_snapshot(str(FIXTURES / "otitis_terminology.tsv"))


@pytest.fixture(scope="session")
def doc() -> GuidelineDoc:
    return parse_guideline(str(FIXTURES / "otitis_externa.md"))


@pytest.fixture(scope="session")
def golden_mgo_text() -> str:
    return (FIXTURES / "golden" / "otitis_mgo.nt").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def golden_patient_text() -> str:
    return (FIXTURES / "golden" / "otitis_patient.nt").read_text(encoding="utf-8")
