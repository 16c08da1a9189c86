"""Ontology construction from a sectioned guideline and a terminology.

The pipeline: collect anatomical mentions across the whole document, grow
them into a rooted anatomy sub-ontology, then scan the clinical sections to
attach symptoms, observations, the diagnosis, and treatments. Curator
decisions override automatic phrase resolution throughout. The five
partial graphs union into the final ontology.

Two attachment modes exist. The default links each clinical phrase to the
anatomy co-mentioned in its sentence (falling back to the nearest earlier
anatomy-bearing sentence in the section, then to the body root) and gates
edge kinds by section kind. Strict mode drops both refinements: every
clinical phrase links to every anatomy node, regardless of section.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .chunker import Phrase, extract_noun_phrases
from .curation import CurationDecisions, mapping_id, resolve_automatically
from .errors import BuildError, NotFoundError
from .guideline import GuidelineDoc, Section, SectionKind
from .model import (
    DiagnosisFlavor,
    MgoGraph,
    NodeKind,
    Partition,
    Relation,
    Triple,
    union,
)
from .terminology import (
    ANATOMY_KINDS,
    TREATMENT_KINDS,
    Concept,
    HierarchyKind,
    TerminologySnapshot,
)

__all__ = [
    "AnatomyMentionSet",
    "BuildReport",
    "collect_anatomy",
    "build_pao",
    "build_clinical",
    "build_mgo",
    "resolve_condition",
]

_FREE_NODE_KIND = {
    SectionKind.SYMPTOMS: NodeKind.SYMPTOM,
    SectionKind.EXAMINATION: NodeKind.OBSERVATION,
    SectionKind.TREATMENT: NodeKind.TREATMENT,
}


@dataclass(frozen=True, slots=True)
class AnatomyMentionSet:
    """Anatomical concepts mentioned in the guideline, with provenance."""

    concept_ids: frozenset[int]
    by_sentence: dict[int, tuple[int, ...]]
    provenance: dict[str, tuple[int, ...]]  # normalized phrase -> sentence indexes


@dataclass(frozen=True, slots=True)
class BuildReport:
    partition_counts: dict[str, int]
    unmatched_phrases: tuple[str, ...]
    overridden_mappings: tuple[str, ...]
    skipped_sentences: tuple[int, ...]

    def to_payload(self) -> dict:
        return {
            "partition_counts": self.partition_counts,
            "unmatched_phrases": list(self.unmatched_phrases),
            "overridden_mappings": list(self.overridden_mappings),
            "skipped_sentences": list(self.skipped_sentences),
        }


def resolve_condition(name: str, snapshot: TerminologySnapshot) -> int:
    """The Disorder concept the guideline is about."""
    ids = [
        cid
        for cid in snapshot.lookup_term(name)
        if snapshot.concepts[cid].kind is HierarchyKind.DISORDER
    ]
    if not ids:
        raise BuildError(f"unknown condition {name!r}: no Disorder concept matches")
    if len(ids) > 1:
        raise BuildError(f"condition {name!r} matches several Disorder concepts: {ids}")
    return ids[0]


def collect_anatomy(
    doc: GuidelineDoc,
    snapshot: TerminologySnapshot,
    stopwords: Iterable[str] | None = None,
) -> AnatomyMentionSet:
    """Anatomical structures and functions mentioned anywhere in the document.

    Every section contributes, whatever its kind; a phrase counts when its
    dictionary lookup includes a BodyStructure or Function concept.
    """
    ids: set[int] = set()
    by_sentence: dict[int, list[int]] = {}
    provenance: dict[str, list[int]] = {}
    for sentence in doc.sentences():
        for phrase in extract_noun_phrases(sentence.text, snapshot, stopwords):
            if not phrase.matched:
                continue
            hits = [
                cid
                for cid in snapshot.lookup_term(phrase.normalized)
                if snapshot.concepts[cid].kind in ANATOMY_KINDS
            ]
            if not hits:
                continue
            ids.update(hits)
            bucket = by_sentence.setdefault(sentence.sentence_index, [])
            bucket.extend(h for h in hits if h not in bucket)
            sentences = provenance.setdefault(phrase.normalized, [])
            if sentence.sentence_index not in sentences:
                sentences.append(sentence.sentence_index)
    return AnatomyMentionSet(
        concept_ids=frozenset(ids),
        by_sentence={k: tuple(sorted(v)) for k, v in sorted(by_sentence.items())},
        provenance={k: tuple(v) for k, v in sorted(provenance.items())},
    )


def _anatomy_node(graph: MgoGraph, concept: Concept) -> str:
    kind = (
        NodeKind.ANATOMICAL_STRUCTURE
        if concept.kind is HierarchyKind.BODY_STRUCTURE
        else NodeKind.ANATOMICAL_FUNCTION
    )
    return graph.add_node(kind, concept.preferred_term, concept_id=concept.id)


def build_pao(mentions: AnatomyMentionSet, snapshot: TerminologySnapshot) -> MgoGraph:
    """The anatomy partition: mentioned concepts, their part-of descendants
    and functions, and the ancestor chain up to the body root.

    Always contains the root, so downstream anchoring never dangles. The
    Patient node is not part of anatomy.
    """
    closure = snapshot.anatomy_closure(mentions.concept_ids)
    retained = set(closure)
    for cid in closure:
        concept = snapshot.concepts[cid]
        if concept.kind is HierarchyKind.FUNCTION and concept.function_of is not None:
            retained.add(concept.function_of)
    for cid in list(retained):
        if snapshot.concepts[cid].kind is HierarchyKind.BODY_STRUCTURE:
            retained.update(snapshot.part_of_ancestors(cid))
    retained.add(snapshot.root_id)

    graph = MgoGraph()
    for cid in sorted(retained):
        _anatomy_node(graph, snapshot.concepts[cid])
    for cid in sorted(retained):
        concept = snapshot.concepts[cid]
        if concept.kind is HierarchyKind.BODY_STRUCTURE:
            parent = concept.part_of_parent
            if parent is not None and parent in retained:
                graph.add_triple(
                    Triple(
                        _anatomy_node(graph, concept),
                        Relation.IS_PART_OF,
                        _anatomy_node(graph, snapshot.concepts[parent]),
                    ),
                    Partition.PAO,
                )
        elif concept.function_of is not None and concept.function_of in retained:
            graph.add_triple(
                Triple(
                    _anatomy_node(graph, snapshot.concepts[concept.function_of]),
                    Relation.HAS_FUNCTION,
                    _anatomy_node(graph, concept),
                ),
                Partition.PAO,
            )
    return graph


class _ClinicalPass:
    """One scan over the document producing the four clinical partitions."""

    def __init__(
        self,
        doc: GuidelineDoc,
        snapshot: TerminologySnapshot,
        pao: MgoGraph,
        condition_id: int,
        decisions: CurationDecisions,
        mentions: AnatomyMentionSet,
        stopwords: Iterable[str] | None,
        strict: bool,
    ) -> None:
        self.doc = doc
        self.snapshot = snapshot
        self.condition_id = condition_id
        self.condition = snapshot.concept(condition_id)
        self.effective = decisions.effective()
        self.mentions = mentions
        self.stopwords = stopwords
        self.strict = strict
        self.pso = MgoGraph()
        self.poo = MgoGraph()
        self.pdo = MgoGraph()
        self.pto = MgoGraph()
        self.seen_mids: set[str] = set()
        self.applied: set[str] = set()
        self.unmatched: set[str] = set()
        self.contributed: set[int] = set()
        self.all_anatomy: tuple[int, ...] = tuple(
            sorted(
                node.concept_id
                for node in pao.nodes.values()
                if node.concept_id is not None
            )
        )

    def run(self) -> None:
        for section in self.doc.sections:
            for sentence in section.sentences:
                if self.mentions.by_sentence.get(sentence.sentence_index):
                    self.contributed.add(sentence.sentence_index)
                for phrase in extract_noun_phrases(
                    sentence.text, self.snapshot, self.stopwords
                ):
                    self._handle_phrase(
                        section, sentence.section_index, sentence.sentence_index, phrase
                    )
        stale = set(self.effective) - self.seen_mids
        if stale:
            raise BuildError(
                "decision log references unknown phrases: " + ", ".join(sorted(stale))
            )

    # -- attachment ----------------------------------------------------------

    def _attachment(self, section: Section, sentence_index: int) -> tuple[int, ...]:
        if self.strict:
            return self.all_anatomy
        ids = self.mentions.by_sentence.get(sentence_index)
        if ids:
            return ids
        for earlier in reversed(
            [s for s in section.sentences if s.sentence_index < sentence_index]
        ):
            ids = self.mentions.by_sentence.get(earlier.sentence_index)
            if ids:
                return ids
        return (self.snapshot.root_id,)

    # -- node helpers --------------------------------------------------------

    def _condition_node(self, graph: MgoGraph) -> str:
        return graph.add_node(
            NodeKind.DIAGNOSIS, self.condition.preferred_term, concept_id=self.condition_id
        )

    def _patient_node(self, graph: MgoGraph) -> str:
        return graph.add_node(NodeKind.PATIENT, "patient")

    # -- per-phrase logic ----------------------------------------------------

    def _handle_phrase(
        self, section: Section, section_index: int, sentence_index: int, phrase: Phrase
    ) -> None:
        mid = mapping_id(phrase.normalized, section_index, sentence_index)
        self.seen_mids.add(mid)
        decision = self.effective.get(mid)

        if decision is not None:
            self.applied.add(mid)
            if decision.status.value == "rejected":
                return
            if decision.concept is None:
                self._emit_free_node(section, sentence_index, phrase)
                return
            try:
                concept = self.snapshot.concept(decision.concept)
            except NotFoundError:
                raise BuildError(
                    f"decision for mapping {mid} names unknown concept {decision.concept}"
                ) from None
            self._emit_concept(section, sentence_index, concept, curated=True)
            return

        if not phrase.matched:
            self.unmatched.add(phrase.normalized)
            return
        concept_id = resolve_automatically(phrase, self.snapshot)
        if concept_id is None:
            return  # ambiguous or weak match: stays in the curation queue
        self._emit_concept(
            section, sentence_index, self.snapshot.concept(concept_id), curated=False
        )

    def _emit_concept(
        self, section: Section, sentence_index: int, concept: Concept, curated: bool
    ) -> None:
        fired = False
        kind = concept.kind
        if kind is HierarchyKind.FINDING and (
            self.strict or section.kind is SectionKind.SYMPTOMS
        ):
            self._attach(
                self.pso,
                NodeKind.SYMPTOM,
                Relation.HAS_SYMPTOM,
                Partition.PSO,
                concept,
                section,
                sentence_index,
            )
            fired = True
        if kind in (HierarchyKind.FINDING, HierarchyKind.DISORDER) and (
            self.strict or section.kind is SectionKind.EXAMINATION
        ):
            self._attach(
                self.poo,
                NodeKind.OBSERVATION,
                Relation.HAS_OBSERVATION,
                Partition.POO,
                concept,
                section,
                sentence_index,
            )
            fired = True
        if kind is HierarchyKind.DISORDER and self.snapshot.is_a_within(
            concept.id, self.condition_id
        ):
            patient = self._patient_node(self.pdo)
            if concept.id == self.condition_id:
                diagnosis = self._condition_node(self.pdo)
            else:
                diagnosis = self.pdo.add_node(
                    NodeKind.DIAGNOSIS, concept.preferred_term, concept_id=concept.id
                )
            self.pdo.add_triple(
                Triple(patient, Relation.DIAGNOSED_WITH, diagnosis), Partition.PDO
            )
            fired = True
        if kind in TREATMENT_KINDS and (
            self.strict or section.kind is SectionKind.TREATMENT
        ):
            treatment = self.pto.add_node(
                NodeKind.TREATMENT, concept.preferred_term, concept_id=concept.id
            )
            patient = self._patient_node(self.pto)
            self.pto.add_triple(
                Triple(patient, Relation.TREATED_WITH, treatment), Partition.PTO
            )
            diagnosis = self._condition_node(self.pto)
            self.pto.add_triple(
                Triple(diagnosis, Relation.HAS_TREATMENT, treatment), Partition.PTO
            )
            fired = True
        # a curated Disorder outside the condition's is-a subtree that no gate
        # consumed becomes an implicit diagnosis: asserted by the curator, not
        # evidenced by any symptom or observation
        if (
            curated
            and not fired
            and kind is HierarchyKind.DISORDER
        ):
            patient = self._patient_node(self.pdo)
            diagnosis = self.pdo.add_node(
                NodeKind.DIAGNOSIS,
                concept.preferred_term,
                concept_id=concept.id,
                flavor=DiagnosisFlavor.IMPLICIT,
            )
            self.pdo.add_triple(
                Triple(patient, Relation.DIAGNOSED_WITH, diagnosis), Partition.PDO
            )
            fired = True
        if fired:
            self.contributed.add(sentence_index)

    def _attach(
        self,
        graph: MgoGraph,
        node_kind: NodeKind,
        relation: Relation,
        partition: Partition,
        concept: Concept,
        section: Section,
        sentence_index: int,
    ) -> None:
        target = graph.add_node(node_kind, concept.preferred_term, concept_id=concept.id)
        for anatomy_id in self._attachment(section, sentence_index):
            source = _anatomy_node(graph, self.snapshot.concepts[anatomy_id])
            graph.add_triple(Triple(source, relation, target), partition)
        graph.add_triple(
            Triple(target, Relation.ASSOCIATED_WITH, self._condition_node(graph)),
            partition,
        )

    def _emit_free_node(
        self, section: Section, sentence_index: int, phrase: Phrase
    ) -> None:
        node_kind = _FREE_NODE_KIND.get(section.kind)
        if node_kind is None:
            return
        if node_kind is NodeKind.TREATMENT:
            treatment = self.pto.add_node(NodeKind.TREATMENT, phrase.normalized, curated=True)
            patient = self._patient_node(self.pto)
            self.pto.add_triple(
                Triple(patient, Relation.TREATED_WITH, treatment), Partition.PTO
            )
            diagnosis = self._condition_node(self.pto)
            self.pto.add_triple(
                Triple(diagnosis, Relation.HAS_TREATMENT, treatment), Partition.PTO
            )
        else:
            graph, relation, partition = (
                (self.pso, Relation.HAS_SYMPTOM, Partition.PSO)
                if node_kind is NodeKind.SYMPTOM
                else (self.poo, Relation.HAS_OBSERVATION, Partition.POO)
            )
            target = graph.add_node(node_kind, phrase.normalized, curated=True)
            for anatomy_id in self._attachment(section, sentence_index):
                source = _anatomy_node(graph, self.snapshot.concepts[anatomy_id])
                graph.add_triple(Triple(source, relation, target), partition)
            graph.add_triple(
                Triple(target, Relation.ASSOCIATED_WITH, self._condition_node(graph)),
                partition,
            )
        self.contributed.add(sentence_index)


def build_clinical(
    doc: GuidelineDoc,
    snapshot: TerminologySnapshot,
    pao: MgoGraph,
    condition_id: int,
    decisions: CurationDecisions | None = None,
    stopwords: Iterable[str] | None = None,
    strict: bool = False,
) -> tuple[MgoGraph, MgoGraph, MgoGraph, MgoGraph]:
    """The symptom, observation, diagnosis and treatment partitions."""
    collected = collect_anatomy(doc, snapshot, stopwords)
    clinical = _ClinicalPass(
        doc,
        snapshot,
        pao,
        condition_id,
        decisions if decisions is not None else CurationDecisions(),
        collected,
        stopwords,
        strict,
    )
    clinical.run()
    return clinical.pso, clinical.poo, clinical.pdo, clinical.pto


def build_mgo(
    doc: GuidelineDoc,
    snapshot: TerminologySnapshot,
    decisions: CurationDecisions | None = None,
    stopwords: Iterable[str] | None = None,
    strict: bool = False,
) -> tuple[MgoGraph, BuildReport]:
    """Full pipeline: anatomy collection, partition builds, union, report.

    Deterministic for fixed inputs and decisions. Validation is the
    caller's move; an unvalidated build is still a graph worth inspecting.
    """
    if decisions is None:
        decisions = CurationDecisions()
    condition_id = resolve_condition(doc.condition_name, snapshot)
    mentions = collect_anatomy(doc, snapshot, stopwords)
    pao = build_pao(mentions, snapshot)
    clinical = _ClinicalPass(
        doc, snapshot, pao, condition_id, decisions, mentions, stopwords, strict
    )
    clinical.run()
    mgo = union([pao, clinical.pso, clinical.poo, clinical.pdo, clinical.pto])

    all_indexes = {s.sentence_index for s in doc.sentences()}
    report = BuildReport(
        partition_counts=mgo.partition_counts(),
        unmatched_phrases=tuple(sorted(clinical.unmatched)),
        overridden_mappings=tuple(sorted(clinical.applied)),
        skipped_sentences=tuple(sorted(all_indexes - clinical.contributed)),
    )
    return mgo, report
