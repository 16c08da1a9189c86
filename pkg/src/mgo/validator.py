"""Well-formedness rules for built ontologies.

Eight numbered rules cover anatomy connectivity, function attachment,
symptom/observation anchoring, the presence of diagnosis and treatment
links, and the explicit/implicit diagnosis discipline. A ninth check
("disjointness") re-derives the relation/kind/partition tables over the
stored triples, catching graphs assembled outside the model API.

Violations are data, not exceptions: an invalid graph is a reportable
state, not a crash.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .model import (
    DiagnosisFlavor,
    Literal,
    MgoGraph,
    NodeKind,
    Partition,
    Relation,
    _PARTITIONS_BY_RELATION,
    _RELATION_TABLE,
)

__all__ = ["Violation", "validate", "explain", "to_json_lines"]

_ANATOMY = frozenset({NodeKind.ANATOMICAL_STRUCTURE, NodeKind.ANATOMICAL_FUNCTION})


@dataclass(frozen=True, slots=True)
class Violation:
    rule_id: str  # "1".."8" or "disjointness"
    elements: tuple[str, ...]
    message: str


def explain(violation: Violation) -> str:
    tag = (
        violation.rule_id
        if violation.rule_id == "disjointness"
        else f"rule {violation.rule_id}"
    )
    return f"{violation.message} ({tag})"


def _anchored(graph: MgoGraph, attach: Relation, labeling: Relation) -> set[str]:
    """Targets reachable from anatomy, directly or through an instance node."""
    anchored: set[str] = set()
    reached_instances: set[str] = set()
    for triple in graph.triples:
        if triple.relation is not attach or isinstance(triple.obj, Literal):
            continue
        if graph.nodes[triple.subject].kind not in _ANATOMY:
            continue
        if graph.nodes[triple.obj].kind is NodeKind.INSTANCE:
            reached_instances.add(triple.obj)
        else:
            anchored.add(triple.obj)
    for triple in graph.triples:
        if (
            triple.relation is labeling
            and triple.subject in reached_instances
            and not isinstance(triple.obj, Literal)
        ):
            anchored.add(triple.obj)
    return anchored


def validate(graph: MgoGraph) -> list[Violation]:
    """All rule violations in the graph, deterministically ordered."""
    found: list[Violation] = []

    # 1: every structure except the root sits inside another structure
    root = graph.structure_root()
    for nid, node in graph.nodes.items():
        if node.kind is not NodeKind.ANATOMICAL_STRUCTURE or nid == root:
            continue
        if not any(
            t.relation is Relation.IS_PART_OF and t.subject == nid for t in graph.triples
        ):
            found.append(
                Violation("1", (nid,), f"Structure {nid} is not part of any structure")
            )

    # 2: every function is assigned to at least one structure
    assigned = {
        t.obj
        for t in graph.triples
        if t.relation is Relation.HAS_FUNCTION and not isinstance(t.obj, Literal)
    }
    for nid, node in graph.nodes.items():
        if node.kind is NodeKind.ANATOMICAL_FUNCTION and nid not in assigned:
            found.append(
                Violation(
                    "2", (nid,), f"Function {nid} is not assigned to any anatomical structure"
                )
            )

    # 3/4: every symptom/observation hangs off an anatomical node
    symptom_anchors = _anchored(graph, Relation.HAS_SYMPTOM, Relation.SYMPTOM)
    observation_anchors = _anchored(graph, Relation.HAS_OBSERVATION, Relation.OBSERVATION)
    for nid, node in graph.nodes.items():
        if node.kind is NodeKind.SYMPTOM and nid not in symptom_anchors:
            found.append(
                Violation(
                    "3", (nid,), f"Symptom {nid} has no hasSymptom edge from an anatomical node"
                )
            )
        elif node.kind is NodeKind.OBSERVATION and nid not in observation_anchors:
            found.append(
                Violation(
                    "4",
                    (nid,),
                    f"Observation {nid} has no hasObservation edge from an anatomical node",
                )
            )

    # 5/6: the patient is diagnosed and treated
    patients = [n.id for n in graph.nodes.values() if n.kind is NodeKind.PATIENT]
    if graph.nodes:
        anchor = patients[0] if patients else "patient:patient"
        if not any(t.relation is Relation.DIAGNOSED_WITH for t in graph.triples):
            found.append(Violation("5", (anchor,), "No diagnosedWith edge from patient"))
        if not any(t.relation is Relation.TREATED_WITH for t in graph.triples):
            found.append(Violation("6", (anchor,), "No treatedWith edge from patient"))

    # 7/8: explicit diagnoses are evidenced, implicit ones are not
    associated: set[str] = {
        t.obj
        for t in graph.triples
        if t.relation is Relation.ASSOCIATED_WITH and not isinstance(t.obj, Literal)
    }
    for nid, node in graph.nodes.items():
        if node.kind is not NodeKind.DIAGNOSIS:
            continue
        if node.flavor is DiagnosisFlavor.IMPLICIT:
            if nid in associated:
                found.append(
                    Violation("8", (nid,), f"Implicit diagnosis {nid} has an associatedWith edge")
                )
        elif nid not in associated:
            found.append(
                Violation(
                    "7", (nid,), f"Explicit diagnosis {nid} has no associated symptom or observation"
                )
            )

    found.extend(_disjointness(graph))
    found.sort(key=lambda v: (v.rule_id == "disjointness", v.rule_id, v.elements))
    return found


def _disjointness(graph: MgoGraph) -> list[Violation]:
    """Re-run the kind and partition tables over the stored triples."""
    found: list[Violation] = []
    for triple, partition in graph.triples.items():
        subject_kinds, object_kinds, literal_policy = _RELATION_TABLE[triple.relation]
        elements = (triple.subject,) if isinstance(triple.obj, Literal) else (
            triple.subject,
            triple.obj,
        )
        if partition not in _PARTITIONS_BY_RELATION[triple.relation]:
            allowed = "/".join(sorted(p.value for p in _PARTITIONS_BY_RELATION[triple.relation]))
            found.append(
                Violation(
                    "disjointness",
                    elements,
                    f"Relation {triple.relation.value} tagged {partition.value} "
                    f"belongs in {allowed}",
                )
            )
            continue
        subject = graph.nodes.get(triple.subject)
        if subject is None or subject.kind not in subject_kinds:
            kind = subject.kind.value if subject else "missing"
            found.append(
                Violation(
                    "disjointness",
                    elements,
                    f"Subject of {triple.relation.value} in {partition.value} "
                    f"has incompatible kind {kind}",
                )
            )
            continue
        if isinstance(triple.obj, Literal):
            if literal_policy == "never":
                found.append(
                    Violation(
                        "disjointness",
                        elements,
                        f"Relation {triple.relation.value} in {partition.value} "
                        f"carries a literal object",
                    )
                )
            continue
        obj = graph.nodes.get(triple.obj)
        if obj is None or obj.kind not in object_kinds:
            kind = obj.kind.value if obj else "missing"
            found.append(
                Violation(
                    "disjointness",
                    elements,
                    f"Object of {triple.relation.value} in {partition.value} "
                    f"has incompatible kind {kind}",
                )
            )
            continue
        if triple.relation is Relation.ASSOCIATED_WITH:
            wanted = (
                Partition.PSO if subject.kind is NodeKind.SYMPTOM else Partition.POO
            )
            if partition is not wanted:
                found.append(
                    Violation(
                        "disjointness",
                        elements,
                        f"associatedWith from a {subject.kind.value} tagged "
                        f"{partition.value} belongs in {wanted.value}",
                    )
                )
    return found


def to_json_lines(violations: list[Violation]) -> str:
    lines = [
        json.dumps(
            {"rule": v.rule_id, "elements": list(v.elements), "message": v.message}
        )
        for v in violations
    ]
    return "\n".join(lines) + ("\n" if lines else "")
