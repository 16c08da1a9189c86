"""Terminology snapshot: flat TSV of concepts with three edge kinds.

Columns: id, preferred_term, synonyms, kind, is_a_parents, part_of_parent,
function_of, is_root. Multi-valued cells use ``|``; an empty cell means none.
Part-of edges over body structures must form a forest with exactly one root,
every function attaches to exactly one body structure.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable

from .chunker import normalize, scrub
from .errors import IntegrityError, NotFoundError, ParseError, PreconditionError

__all__ = [
    "HierarchyKind",
    "Concept",
    "TerminologySnapshot",
    "load_snapshot",
]

_COLUMNS = (
    "id",
    "preferred_term",
    "synonyms",
    "kind",
    "is_a_parents",
    "part_of_parent",
    "function_of",
    "is_root",
)


class HierarchyKind(enum.Enum):
    BODY_STRUCTURE = "BodyStructure"
    FINDING = "Finding"
    DISORDER = "Disorder"
    PROCEDURE = "Procedure"
    SUBSTANCE = "Substance"
    DOSE_FORM = "DoseForm"
    PHYSICAL_OBJECT = "PhysicalObject"
    FUNCTION = "Function"
    OTHER = "Other"


ANATOMY_KINDS = frozenset({HierarchyKind.BODY_STRUCTURE, HierarchyKind.FUNCTION})

TREATMENT_KINDS = frozenset(
    {
        HierarchyKind.PROCEDURE,
        HierarchyKind.SUBSTANCE,
        HierarchyKind.DOSE_FORM,
        HierarchyKind.PHYSICAL_OBJECT,
    }
)


@dataclass(frozen=True, slots=True)
class Concept:
    id: int
    preferred_term: str
    synonyms: tuple[str, ...]
    kind: HierarchyKind
    is_a_parents: tuple[int, ...]
    part_of_parent: int | None
    function_of: int | None
    is_root: bool

    def descriptors(self) -> tuple[str, ...]:
        return (self.preferred_term, *self.synonyms)


@dataclass(slots=True)
class TerminologySnapshot:
    concepts: dict[int, Concept]
    root_id: int
    _norm_index: dict[str, tuple[int, ...]] = field(default_factory=dict)
    _scrub_index: dict[str, tuple[int, ...]] = field(default_factory=dict)
    _part_children: dict[int, tuple[int, ...]] = field(default_factory=dict)
    _functions_of: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        norm_map: dict[str, set[int]] = {}
        scrub_map: dict[str, set[int]] = {}
        part_children: dict[int, list[int]] = {}
        functions: dict[int, list[int]] = {}
        for concept in self.concepts.values():
            for descriptor in concept.descriptors():
                norm_map.setdefault(normalize(descriptor), set()).add(concept.id)
                scrub_map.setdefault(scrub(descriptor), set()).add(concept.id)
            if concept.part_of_parent is not None:
                part_children.setdefault(concept.part_of_parent, []).append(concept.id)
            if concept.function_of is not None:
                functions.setdefault(concept.function_of, []).append(concept.id)
        self._norm_index = {k: tuple(sorted(v)) for k, v in norm_map.items()}
        self._scrub_index = {k: tuple(sorted(v)) for k, v in scrub_map.items()}
        self._part_children = {k: tuple(sorted(v)) for k, v in part_children.items()}
        self._functions_of = {k: tuple(sorted(v)) for k, v in functions.items()}

    def __len__(self) -> int:
        return len(self.concepts)

    def concept(self, cid: int) -> Concept:
        try:
            return self.concepts[cid]
        except KeyError:
            raise NotFoundError(f"unknown concept id {cid}") from None

    def lookup_term(self, phrase: str) -> list[int]:
        """Concept ids whose normalized descriptors equal ``normalize(phrase)``, ascending."""
        return list(self._norm_index.get(normalize(phrase), ()))

    def exact_term_ids(self, scrubbed: str) -> list[int]:
        """Concept ids with a descriptor exactly equal to the scrubbed phrase."""
        return list(self._scrub_index.get(scrubbed, ()))

    def in_hierarchy(self, cid: int, kind: HierarchyKind) -> bool:
        return self.concept(cid).kind is kind

    def is_a_within(self, cid: int, ancestor: int) -> bool:
        """True iff ``cid`` equals ``ancestor`` or is an is-a descendant of it."""
        self.concept(ancestor)
        seen: set[int] = set()
        frontier = [cid]
        while frontier:
            current = frontier.pop()
            if current == ancestor:
                return True
            if current in seen:
                continue
            seen.add(current)
            frontier.extend(self.concept(current).is_a_parents)
        return False

    def part_of_ancestors(self, cid: int) -> list[int]:
        """Chain of part-of parents from ``cid`` (exclusive) up to the root."""
        ancestors: list[int] = []
        parent = self.concept(cid).part_of_parent
        while parent is not None:
            ancestors.append(parent)
            parent = self.concepts[parent].part_of_parent
        return ancestors

    def anatomy_closure(self, seeds: Iterable[int]) -> set[int]:
        """Seeds plus all part-of descendants, plus functions of everything collected.

        Seeds must be BodyStructure or Function concepts. Idempotent and
        monotone in the seed set.
        """
        result: set[int] = set()
        frontier: list[int] = []
        for seed in seeds:
            concept = self.concept(seed)
            if concept.kind not in ANATOMY_KINDS:
                raise PreconditionError(
                    f"anatomy closure seed {seed} has kind {concept.kind.value}, "
                    "expected BodyStructure or Function"
                )
            result.add(seed)
            if concept.kind is HierarchyKind.BODY_STRUCTURE:
                frontier.append(seed)
        while frontier:
            current = frontier.pop()
            for child in self._part_children.get(current, ()):
                if child not in result:
                    result.add(child)
                    frontier.append(child)
        for structure in list(result):
            result.update(self._functions_of.get(structure, ()))
        return result


def _parse_int(cell: str, line: int, path: str, what: str) -> int:
    try:
        return int(cell)
    except ValueError:
        raise ParseError(f"{what} is not an integer: {cell!r}", path, line) from None


def _parse_int_list(cell: str, line: int, path: str, what: str) -> tuple[int, ...]:
    if not cell:
        return ()
    return tuple(_parse_int(part.strip(), line, path, what) for part in cell.split("|"))


def load_snapshot(path: str) -> TerminologySnapshot:
    """Load and integrity-check a terminology snapshot TSV."""
    with open(path, encoding="utf-8") as handle:
        lines = handle.read().splitlines()

    rows = [(n, line) for n, line in enumerate(lines, start=1) if line.strip()]
    if not rows:
        raise ParseError("no concepts in snapshot", path, 1)

    header_no, header = rows[0]
    if tuple(header.rstrip("\n").split("\t")) != _COLUMNS:
        raise ParseError(
            "bad header row, expected: " + "\t".join(_COLUMNS), path, header_no
        )
    if len(rows) == 1:
        raise ParseError("no concepts in snapshot", path, header_no)

    concepts: dict[int, Concept] = {}
    for line_no, line in rows[1:]:
        cells = line.split("\t")
        if len(cells) != len(_COLUMNS):
            raise ParseError(
                f"expected {len(_COLUMNS)} tab-separated cells, found {len(cells)}",
                path,
                line_no,
            )
        cid = _parse_int(cells[0], line_no, path, "concept id")
        preferred = cells[1].strip()
        if not preferred:
            raise ParseError("empty preferred_term", path, line_no)
        synonyms = tuple(s.strip() for s in cells[2].split("|") if s.strip()) if cells[2] else ()
        try:
            kind = HierarchyKind(cells[3].strip())
        except ValueError:
            raise ParseError(f"unknown hierarchy kind {cells[3]!r}", path, line_no) from None
        is_a = _parse_int_list(cells[4], line_no, path, "is_a parent")
        part_of = _parse_int(cells[5], line_no, path, "part_of parent") if cells[5] else None
        function_of = _parse_int(cells[6], line_no, path, "function_of") if cells[6] else None
        is_root = cells[7].strip() == "1"

        if cid in concepts:
            raise IntegrityError(f"duplicate concept id {cid}")
        concepts[cid] = Concept(cid, preferred, synonyms, kind, is_a, part_of, function_of, is_root)

    _check_integrity(concepts)
    root_id = next(c.id for c in concepts.values() if c.is_root)
    return TerminologySnapshot(concepts=concepts, root_id=root_id)


def _check_integrity(concepts: dict[int, Concept]) -> None:
    for concept in concepts.values():
        for parent in concept.is_a_parents:
            if parent not in concepts:
                raise IntegrityError(
                    f"concept {concept.id} has dangling is_a parent {parent}"
                )
        if concept.part_of_parent is not None:
            if concept.kind is not HierarchyKind.BODY_STRUCTURE:
                raise IntegrityError(
                    f"concept {concept.id} is not a BodyStructure but has a part_of parent"
                )
            target = concepts.get(concept.part_of_parent)
            if target is None:
                raise IntegrityError(
                    f"concept {concept.id} has dangling part_of parent {concept.part_of_parent}"
                )
            if target.kind is not HierarchyKind.BODY_STRUCTURE:
                raise IntegrityError(
                    f"concept {concept.id} is part of non-structure {target.id}"
                )
        if concept.kind is HierarchyKind.FUNCTION:
            if concept.function_of is None:
                raise IntegrityError(f"function {concept.id} is not attached to a structure")
            target = concepts.get(concept.function_of)
            if target is None:
                raise IntegrityError(
                    f"concept {concept.id} has dangling function_of {concept.function_of}"
                )
            if target.kind is not HierarchyKind.BODY_STRUCTURE:
                raise IntegrityError(
                    f"function {concept.id} attaches to non-structure {target.id}"
                )
        elif concept.function_of is not None:
            raise IntegrityError(
                f"concept {concept.id} is not a Function but has function_of"
            )

    roots = [c for c in concepts.values() if c.is_root]
    if len(roots) != 1:
        raise IntegrityError(f"expected exactly one root structure, found {len(roots)}")
    root = roots[0]
    if root.kind is not HierarchyKind.BODY_STRUCTURE:
        raise IntegrityError(f"root {root.id} is not a BodyStructure")
    if root.part_of_parent is not None:
        raise IntegrityError(f"root {root.id} must not have a part_of parent")

    for concept in concepts.values():
        if concept.kind is not HierarchyKind.BODY_STRUCTURE or concept.is_root:
            continue
        if concept.part_of_parent is None:
            raise IntegrityError(
                f"structure {concept.id} cannot reach the root: no part_of parent"
            )
        seen = {concept.id}
        parent: int | None = concept.part_of_parent
        while parent is not None:
            if parent in seen:
                raise IntegrityError(f"part_of cycle through concept {parent}")
            seen.add(parent)
            parent = concepts[parent].part_of_parent
