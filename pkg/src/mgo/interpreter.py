"""Filtering a consultation graph through a guideline ontology.

A consultation transcript arrives as instance-level triples: anatomy
attached to numbered instance nodes, instance nodes labeled with the
symptom or observation they stand for, optional recorded values, plus
direct diagnosis/treatment statements. Interpretation keeps exactly the
triples the ontology can account for and records, per retained triple,
which schema triple it instantiates.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .chunker import normalize
from .errors import InterpretationError
from .model import (
    Literal,
    MgoGraph,
    NodeKind,
    Partition,
    PatientGraph,
    Relation,
    Triple,
)
from .serializer import from_ntriples

__all__ = ["interpret", "reduction_ratio", "load_consultation"]

_REL_IRI = re.compile(r"<urn:mgo:rel:([^<>\s]+)>")
_KNOWN_RELATIONS = frozenset(r.value for r in Relation) | frozenset(
    {"snomedConcept", "label", "flavor", "curated"}
)


def load_consultation(path: str) -> MgoGraph:
    """Parse a consultation file, rejecting foreign relation vocabulary.

    All unknown relations are reported at once, so a transcript produced by
    a mismatched upstream stage fails with one actionable message.
    """
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    unknown = sorted(
        {
            name
            for name in _REL_IRI.findall(text)
            if name not in _KNOWN_RELATIONS
        }
    )
    if unknown:
        raise InterpretationError(
            "consultation uses relations outside the vocabulary: " + ", ".join(unknown)
        )
    return from_ntriples(text, path=path)

_LABELING_FOR = {
    Relation.HAS_SYMPTOM: Relation.SYMPTOM,
    Relation.HAS_OBSERVATION: Relation.OBSERVATION,
}
_TARGET_KIND = {
    Relation.SYMPTOM: NodeKind.SYMPTOM,
    Relation.OBSERVATION: NodeKind.OBSERVATION,
}


class _Resolver:
    """Consultation node -> ontology node, by concept link then by label.

    Node ids are derived from labels, so an identical id counts as a label
    match; otherwise the normalized labels must agree. Kinds must always
    agree: an observation never resolves to a symptom.
    """

    def __init__(self, mgo: MgoGraph) -> None:
        self._mgo = mgo
        self._by_concept: dict[tuple[NodeKind, int], str] = {}
        self._by_label: dict[tuple[NodeKind, str], str] = {}
        for node in sorted(mgo.nodes.values(), key=lambda n: n.id):
            if node.concept_id is not None:
                self._by_concept.setdefault((node.kind, node.concept_id), node.id)
            self._by_label.setdefault((node.kind, normalize(node.label)), node.id)

    def resolve(self, node_id: str, consultation: MgoGraph) -> str | None:
        node = consultation.nodes[node_id]
        if node.kind is NodeKind.INSTANCE:
            return None
        if node.concept_id is not None:
            hit = self._by_concept.get((node.kind, node.concept_id))
            if hit is not None:
                return hit
        mgo_node = self._mgo.nodes.get(node_id)
        if mgo_node is not None and mgo_node.kind is node.kind:
            return node_id
        return self._by_label.get((node.kind, normalize(node.label)))

    def resolve_literal(self, text: str, kind: NodeKind) -> str | None:
        return self._by_label.get((kind, normalize(text)))


def interpret(consultation: MgoGraph, mgo: MgoGraph) -> PatientGraph:
    """The consultation subgraph the ontology accounts for.

    A direct triple survives iff its endpoints resolve to ontology nodes
    joined by the same relation. An instance reification (attachment,
    labeling, recorded values) survives as a group iff the flattened
    schema triple exists. Everything else is dropped silently: absence of
    evidence is expressed as absence of triples.
    """
    resolver = _Resolver(mgo)
    schema = set(mgo.triples)

    labelings: dict[str, list[Triple]] = {}
    values: dict[str, list[Triple]] = {}
    for triple in consultation:
        if triple.relation in (Relation.SYMPTOM, Relation.OBSERVATION):
            labelings.setdefault(triple.subject, []).append(triple)
        elif triple.relation is Relation.HAS_VALUE:
            values.setdefault(triple.subject, []).append(triple)

    retained: dict[Triple, tuple[Partition, Triple]] = {}

    def keep(triple: Triple, anchor: Triple) -> None:
        retained.setdefault(triple, (mgo.partition_of(anchor), anchor))

    for triple in consultation:
        if triple.relation not in _LABELING_FOR or isinstance(triple.obj, Literal):
            continue
        if consultation.nodes[triple.obj].kind is not NodeKind.INSTANCE:
            continue
        anatomy = resolver.resolve(triple.subject, consultation)
        if anatomy is None:
            continue
        labeling_relation = _LABELING_FOR[triple.relation]
        for labeling in labelings.get(triple.obj, ()):
            if labeling.relation is not labeling_relation:
                continue
            if isinstance(labeling.obj, Literal):
                target = resolver.resolve_literal(
                    labeling.obj.text, _TARGET_KIND[labeling_relation]
                )
            else:
                target = resolver.resolve(labeling.obj, consultation)
            if target is None:
                continue
            anchor = Triple(anatomy, triple.relation, target)
            if anchor not in schema:
                continue
            keep(triple, anchor)
            keep(labeling, anchor)
            for value in values.get(triple.obj, ()):
                keep(value, anchor)

    for triple in consultation:
        if triple.relation in (Relation.SYMPTOM, Relation.OBSERVATION):
            continue
        if triple.relation is Relation.HAS_VALUE:
            continue
        if (
            triple.relation in _LABELING_FOR
            and not isinstance(triple.obj, Literal)
            and consultation.nodes[triple.obj].kind is NodeKind.INSTANCE
        ):
            continue
        if isinstance(triple.obj, Literal):
            continue
        subject = resolver.resolve(triple.subject, consultation)
        obj = resolver.resolve(triple.obj, consultation)
        if subject is None or obj is None:
            continue
        anchor = Triple(subject, triple.relation, obj)
        if anchor in schema:
            keep(triple, anchor)

    patient = PatientGraph()
    for triple in retained:
        for node_id in (triple.subject,) if isinstance(triple.obj, Literal) else (
            triple.subject,
            triple.obj,
        ):
            if not patient.has_node(node_id):
                source = consultation.nodes[node_id]
                patient.add_node(
                    source.kind,
                    source.label,
                    concept_id=source.concept_id,
                    flavor=source.flavor,
                    curated=source.curated,
                    node_id=source.id,
                )
    for triple, (partition, anchor) in retained.items():
        patient.record(triple, partition, anchor)
    return patient


def reduction_ratio(consultation: MgoGraph, patient: MgoGraph) -> Fraction:
    """|patient triples| / |consultation triples|; 0 when the consultation
    is empty."""
    if len(consultation) == 0:
        return Fraction(0)
    return Fraction(len(patient), len(consultation))
