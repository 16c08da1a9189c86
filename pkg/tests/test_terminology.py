from __future__ import annotations

import random

import pytest

from mgo.errors import IntegrityError, NotFoundError, ParseError, PreconditionError
from mgo.terminology import (
    Concept,
    HierarchyKind,
    TerminologySnapshot,
    load_snapshot,
)

_HEADER = "id\tpreferred_term\tsynonyms\tkind\tis_a_parents\tpart_of_parent\tfunction_of\tis_root"


def _write_tsv(tmp_path, rows):
    path = tmp_path / "snapshot.tsv"
    path.write_text("\n".join([_HEADER, *rows]) + "\n", encoding="utf-8")
    return str(path)


def _row(
    cid,
    term,
    kind="BodyStructure",
    synonyms="",
    is_a="",
    part_of="",
    function_of="",
    is_root="",
):
    return "\t".join(
        [str(cid), term, synonyms, kind, is_a, str(part_of), str(function_of), is_root]
    )


def test_fixture_snapshot_parses(snapshot):
    assert len(snapshot) == 55
    assert snapshot.root_id == 1
    canal = snapshot.concept(5)
    assert canal.preferred_term == "external auditory canal"
    assert canal.synonyms == ("ear canal", "external ear canal", "auditory canal")
    assert canal.part_of_parent == 3
    assert canal.kind is HierarchyKind.BODY_STRUCTURE
    assert snapshot.concept(14).function_of == 3
    assert snapshot.concept(32).is_a_parents == (30,)


def test_lookup_term_is_normalize_level(snapshot):
    assert snapshot.lookup_term("Ears") == [3]
    assert snapshot.lookup_term("the ear drops") == [45]
    assert snapshot.lookup_term("discharge") == [19, 37]
    assert snapshot.lookup_term("aural toilet") == [35]
    assert snapshot.lookup_term("no such term") == []


def test_exact_term_ids_is_scrub_level(snapshot):
    assert snapshot.exact_term_ids("swimmer's ear") == [30]
    assert snapshot.exact_term_ids("drops") == [45]
    assert snapshot.exact_term_ids("scars") == [21]
    # scrub keeps the plural, so a plural without a plural descriptor misses
    assert snapshot.exact_term_ids("eardrums") == []


def test_concept_and_hierarchy_queries(snapshot):
    with pytest.raises(NotFoundError):
        snapshot.concept(999)
    assert snapshot.in_hierarchy(30, HierarchyKind.DISORDER)
    assert not snapshot.in_hierarchy(30, HierarchyKind.FINDING)
    assert snapshot.is_a_within(32, 30)
    assert snapshot.is_a_within(30, 30)
    assert not snapshot.is_a_within(30, 32)
    assert not snapshot.is_a_within(33, 30)
    with pytest.raises(NotFoundError):
        snapshot.is_a_within(30, 999)


def test_part_of_ancestors(snapshot):
    assert snapshot.part_of_ancestors(9) == [4, 3, 2, 1]
    assert snapshot.part_of_ancestors(1) == []
    assert snapshot.part_of_ancestors(14) == []


def test_anatomy_closure_on_fixture(snapshot):
    assert snapshot.anatomy_closure([3]) == {3, 4, 5, 6, 7, 8, 9, 14, 15}
    assert snapshot.anatomy_closure([10]) == {10, 16}
    # a function seed does not descend into structures
    assert snapshot.anatomy_closure([14]) == {14}
    assert snapshot.anatomy_closure([]) == set()
    with pytest.raises(PreconditionError):
        snapshot.anatomy_closure([17])


def _random_snapshot(rng: random.Random) -> TerminologySnapshot:
    concepts: dict[int, Concept] = {}
    count = rng.randint(4, 12)
    concepts[1] = Concept(1, "trunk", (), HierarchyKind.BODY_STRUCTURE, (), None, None, True)
    for cid in range(2, count + 1):
        parent = rng.randint(1, cid - 1)
        concepts[cid] = Concept(
            cid, f"part {cid}", (), HierarchyKind.BODY_STRUCTURE, (), parent, None, False
        )
    next_id = count + 1
    for _ in range(rng.randint(0, 4)):
        owner = rng.randint(1, count)
        concepts[next_id] = Concept(
            next_id, f"role {next_id}", (), HierarchyKind.FUNCTION, (), None, owner, False
        )
        next_id += 1
    return TerminologySnapshot(concepts=concepts, root_id=1)


def test_anatomy_closure_matches_fixed_point_oracle():
    rng = random.Random(90210)
    for _ in range(50):
        snapshot = _random_snapshot(rng)
        structures = [
            c.id
            for c in snapshot.concepts.values()
            if c.kind is HierarchyKind.BODY_STRUCTURE
        ]
        functions = [
            c.id for c in snapshot.concepts.values() if c.kind is HierarchyKind.FUNCTION
        ]
        pool = structures + functions
        seeds = set(rng.sample(pool, rng.randint(1, len(pool))))
        got = snapshot.anatomy_closure(seeds)
        # oracle: descend part-of from structure seeds only, then add functions
        expected = set(seeds)
        frontier_changed = True
        while frontier_changed:
            frontier_changed = False
            for concept in snapshot.concepts.values():
                if (
                    concept.kind is HierarchyKind.BODY_STRUCTURE
                    and concept.part_of_parent is not None
                    and concept.part_of_parent in expected
                    and snapshot.concepts[concept.part_of_parent].kind
                    is HierarchyKind.BODY_STRUCTURE
                    and concept.id not in expected
                ):
                    expected.add(concept.id)
                    frontier_changed = True
        for concept in snapshot.concepts.values():
            if concept.function_of is not None and concept.function_of in expected:
                expected.add(concept.id)
        assert got == expected
        # a closure is a fixed point
        assert snapshot.anatomy_closure(got) == got


def test_load_snapshot_rejects_malformed_rows(tmp_path):
    with pytest.raises(ParseError, match="bad header"):
        path = tmp_path / "bad_header.tsv"
        path.write_text("wrong\theader\n1\tx\n", encoding="utf-8")
        load_snapshot(str(path))
    with pytest.raises(ParseError, match="cells"):
        load_snapshot(_write_tsv(tmp_path, ["1\tbody\tBodyStructure"]))
    with pytest.raises(ParseError, match="not an integer"):
        load_snapshot(_write_tsv(tmp_path, [_row("x", "body", is_root="1")]))
    with pytest.raises(ParseError, match="empty preferred_term"):
        load_snapshot(_write_tsv(tmp_path, [_row(1, " ", is_root="1")]))
    with pytest.raises(ParseError, match="unknown hierarchy kind"):
        load_snapshot(_write_tsv(tmp_path, [_row(1, "body", kind="Shape", is_root="1")]))
    with pytest.raises(ParseError, match="no concepts"):
        path = tmp_path / "empty.tsv"
        path.write_text(_HEADER + "\n", encoding="utf-8")
        load_snapshot(str(path))


def test_load_snapshot_integrity_errors(tmp_path):
    root = _row(1, "body", is_root="1")
    with pytest.raises(IntegrityError, match="duplicate concept id"):
        load_snapshot(_write_tsv(tmp_path, [root, _row(1, "again")]))
    with pytest.raises(IntegrityError, match="dangling is_a"):
        load_snapshot(_write_tsv(tmp_path, [root, _row(2, "sore", "Finding", is_a="9")]))
    with pytest.raises(IntegrityError, match="dangling part_of"):
        load_snapshot(_write_tsv(tmp_path, [root, _row(2, "arm", part_of="9")]))
    with pytest.raises(IntegrityError, match="not a BodyStructure but has a part_of"):
        load_snapshot(
            _write_tsv(tmp_path, [root, _row(2, "sore", "Finding", part_of="1")])
        )
    with pytest.raises(IntegrityError, match="not attached to a structure"):
        load_snapshot(_write_tsv(tmp_path, [root, _row(2, "gait", "Function")]))
    with pytest.raises(IntegrityError, match="attaches to non-structure"):
        load_snapshot(
            _write_tsv(
                tmp_path,
                [
                    root,
                    _row(2, "sore", "Finding"),
                    _row(3, "gait", "Function", function_of="2"),
                ],
            )
        )
    with pytest.raises(IntegrityError, match="not a Function but has function_of"):
        load_snapshot(
            _write_tsv(tmp_path, [root, _row(2, "arm", part_of="1", function_of="1")])
        )
    with pytest.raises(IntegrityError, match="exactly one root"):
        load_snapshot(
            _write_tsv(tmp_path, [root, _row(2, "other body", is_root="1")])
        )
    with pytest.raises(IntegrityError, match="exactly one root"):
        load_snapshot(_write_tsv(tmp_path, [_row(1, "body", part_of="")]))
    with pytest.raises(IntegrityError, match="cannot reach the root"):
        load_snapshot(_write_tsv(tmp_path, [root, _row(2, "arm")]))
    with pytest.raises(IntegrityError, match="root .* must not have a part_of"):
        load_snapshot(
            _write_tsv(
                tmp_path, [_row(1, "body", part_of="2", is_root="1"), _row(2, "arm", part_of="1")]
            )
        )
    with pytest.raises(IntegrityError, match="cycle"):
        load_snapshot(
            _write_tsv(
                tmp_path,
                [root, _row(2, "arm", part_of="3"), _row(3, "hand", part_of="2")],
            )
        )
