"""Typed triple graph for guideline ontologies and instance graphs.

Nodes are namespaced ids (``anat:ear``, ``symp:earPain``); every triple
carries a sub-ontology partition tag. Insertion enforces the relation/kind
and relation/partition compatibility tables, so a structurally broken graph
cannot be built through the public API.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, replace
from typing import Iterable, Iterator

from .errors import ModelError

__all__ = [
    "NodeKind",
    "DiagnosisFlavor",
    "Relation",
    "Partition",
    "Literal",
    "Triple",
    "Node",
    "MgoGraph",
    "PatientGraph",
    "union",
    "camel_local",
    "node_id_for",
    "PATIENT_NODE_ID",
]


class NodeKind(enum.Enum):
    ANATOMICAL_STRUCTURE = "AnatomicalStructure"
    ANATOMICAL_FUNCTION = "AnatomicalFunction"
    SYMPTOM = "Symptom"
    OBSERVATION = "Observation"
    VALUE = "Value"
    DIAGNOSIS = "Diagnosis"
    TREATMENT = "Treatment"
    PATIENT = "Patient"
    INSTANCE = "InstanceNode"


class DiagnosisFlavor(enum.Enum):
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"


class Relation(enum.Enum):
    IS_PART_OF = "isPartOf"
    HAS_FUNCTION = "hasFunction"
    HAS_SYMPTOM = "hasSymptom"
    HAS_OBSERVATION = "hasObservation"
    DIAGNOSED_WITH = "diagnosedWith"
    TREATED_WITH = "treatedWith"
    ASSOCIATED_WITH = "associatedWith"
    HAS_TREATMENT = "hasTreatment"
    HAS_VALUE = "hasValue"
    SYMPTOM = "symptom"
    OBSERVATION = "observation"


class Partition(enum.Enum):
    PAO = "PAO"
    PSO = "PSO"
    POO = "POO"
    PDO = "PDO"
    PTO = "PTO"


@dataclass(frozen=True, slots=True)
class Literal:
    text: str


@dataclass(frozen=True, slots=True)
class Triple:
    subject: str
    relation: Relation
    obj: str | Literal


@dataclass(slots=True)
class Node:
    id: str
    kind: NodeKind
    label: str
    concept_id: int | None = None
    flavor: DiagnosisFlavor | None = None
    curated: bool = False

    def copy(self) -> "Node":
        return replace(self)


NAMESPACE_BY_KIND: dict[NodeKind, str] = {
    NodeKind.ANATOMICAL_STRUCTURE: "anat",
    NodeKind.ANATOMICAL_FUNCTION: "anat",
    NodeKind.SYMPTOM: "symp",
    NodeKind.OBSERVATION: "obs",
    NodeKind.DIAGNOSIS: "diag",
    NodeKind.TREATMENT: "treat",
    NodeKind.PATIENT: "patient",
    NodeKind.INSTANCE: "inst",
}

DEFAULT_KIND_BY_NAMESPACE: dict[str, NodeKind] = {
    "anat": NodeKind.ANATOMICAL_STRUCTURE,
    "symp": NodeKind.SYMPTOM,
    "obs": NodeKind.OBSERVATION,
    "diag": NodeKind.DIAGNOSIS,
    "treat": NodeKind.TREATMENT,
    "patient": NodeKind.PATIENT,
    "inst": NodeKind.INSTANCE,
}

PATIENT_NODE_ID = "patient:patient"

_A_KINDS = frozenset({NodeKind.ANATOMICAL_STRUCTURE, NodeKind.ANATOMICAL_FUNCTION})

# relation -> (allowed subject kinds, allowed object node kinds, literal policy)
# literal policy: "never", "allowed", "required"
_RELATION_TABLE: dict[Relation, tuple[frozenset[NodeKind], frozenset[NodeKind], str]] = {
    Relation.IS_PART_OF: (
        frozenset({NodeKind.ANATOMICAL_STRUCTURE}),
        frozenset({NodeKind.ANATOMICAL_STRUCTURE}),
        "never",
    ),
    Relation.HAS_FUNCTION: (
        frozenset({NodeKind.ANATOMICAL_STRUCTURE}),
        frozenset({NodeKind.ANATOMICAL_FUNCTION}),
        "never",
    ),
    Relation.HAS_SYMPTOM: (_A_KINDS, frozenset({NodeKind.SYMPTOM, NodeKind.INSTANCE}), "never"),
    Relation.HAS_OBSERVATION: (
        _A_KINDS,
        frozenset({NodeKind.OBSERVATION, NodeKind.INSTANCE}),
        "never",
    ),
    Relation.DIAGNOSED_WITH: (
        frozenset({NodeKind.PATIENT}),
        frozenset({NodeKind.DIAGNOSIS}),
        "never",
    ),
    Relation.TREATED_WITH: (
        frozenset({NodeKind.PATIENT}),
        frozenset({NodeKind.TREATMENT}),
        "never",
    ),
    Relation.ASSOCIATED_WITH: (
        frozenset({NodeKind.SYMPTOM, NodeKind.OBSERVATION}),
        frozenset({NodeKind.DIAGNOSIS}),
        "never",
    ),
    Relation.HAS_TREATMENT: (
        frozenset({NodeKind.DIAGNOSIS}),
        frozenset({NodeKind.TREATMENT}),
        "never",
    ),
    Relation.HAS_VALUE: (frozenset({NodeKind.INSTANCE}), frozenset(), "required"),
    Relation.SYMPTOM: (
        frozenset({NodeKind.INSTANCE}),
        frozenset({NodeKind.SYMPTOM}),
        "allowed",
    ),
    Relation.OBSERVATION: (
        frozenset({NodeKind.INSTANCE}),
        frozenset({NodeKind.OBSERVATION}),
        "allowed",
    ),
}

_PARTITIONS_BY_RELATION: dict[Relation, frozenset[Partition]] = {
    Relation.IS_PART_OF: frozenset({Partition.PAO}),
    Relation.HAS_FUNCTION: frozenset({Partition.PAO}),
    Relation.HAS_SYMPTOM: frozenset({Partition.PSO}),
    Relation.HAS_OBSERVATION: frozenset({Partition.POO}),
    Relation.DIAGNOSED_WITH: frozenset({Partition.PDO}),
    Relation.TREATED_WITH: frozenset({Partition.PTO}),
    Relation.ASSOCIATED_WITH: frozenset({Partition.PSO, Partition.POO}),
    Relation.HAS_TREATMENT: frozenset({Partition.PTO}),
    Relation.HAS_VALUE: frozenset({Partition.PSO, Partition.POO}),
    Relation.SYMPTOM: frozenset({Partition.PSO}),
    Relation.OBSERVATION: frozenset({Partition.POO}),
}

_WORD_SPLIT = re.compile(r"[^0-9A-Za-z_]+")


def camel_local(label: str) -> str:
    """Label to IRI local name: words joined camelCase, existing case kept.

    "external auditory canal" -> externalAuditoryCanal,
    "Otitis Externa" -> OtitisExterna, "symp_2" -> symp_2.
    """
    words = [w for w in _WORD_SPLIT.split(label) if w]
    if not words:
        raise ModelError(f"cannot derive a local name from label {label!r}")
    return words[0] + "".join(w[0].upper() + w[1:] for w in words[1:])


def node_id_for(kind: NodeKind, label: str) -> str:
    namespace = NAMESPACE_BY_KIND.get(kind)
    if namespace is None:
        raise ModelError(f"{kind.value} nodes are represented as literals, not graph nodes")
    return f"{namespace}:{camel_local(label)}"


class MgoGraph:
    """Mutable typed graph: nodes plus partition-tagged triples."""

    def __init__(self) -> None:
        self._nodes: dict[str, Node] = {}
        self._triples: dict[Triple, Partition] = {}

    # -- nodes ---------------------------------------------------------------

    @property
    def nodes(self) -> dict[str, Node]:
        return self._nodes

    def node(self, node_id: str) -> Node:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise ModelError(f"unknown node {node_id}") from None

    def has_node(self, node_id: str) -> bool:
        return node_id in self._nodes

    def add_node(
        self,
        kind: NodeKind,
        label: str,
        *,
        concept_id: int | None = None,
        flavor: DiagnosisFlavor | None = None,
        curated: bool = False,
        node_id: str | None = None,
    ) -> str:
        """Declare a node, returning its id. Re-declaring identical data is a no-op."""
        if kind is NodeKind.DIAGNOSIS and flavor is None:
            flavor = DiagnosisFlavor.EXPLICIT
        if kind is not NodeKind.DIAGNOSIS and flavor is not None:
            raise ModelError(f"flavor is only valid on Diagnosis nodes, not {kind.value}")
        nid = node_id_for(kind, label) if node_id is None else node_id
        new = Node(nid, kind, label, concept_id, flavor, curated)
        existing = self._nodes.get(nid)
        if existing is None:
            self._nodes[nid] = new
            return nid
        if existing.kind is not new.kind:
            raise ModelError(
                f"kind clash on {nid}: {existing.kind.value} vs {new.kind.value}"
            )
        if (existing.label, existing.concept_id, existing.flavor, existing.curated) != (
            new.label,
            new.concept_id,
            new.flavor,
            new.curated,
        ):
            raise ModelError(f"conflicting redeclaration of node {nid}")
        return nid

    def set_flavor(self, node_id: str, flavor: DiagnosisFlavor) -> None:
        node = self.node(node_id)
        if node.kind is not NodeKind.DIAGNOSIS:
            raise ModelError(f"{node_id} is not a Diagnosis node")
        node.flavor = flavor

    def _default_node(self, node_id: str, as_function: bool = False) -> Node:
        namespace, _, local = node_id.partition(":")
        kind = DEFAULT_KIND_BY_NAMESPACE.get(namespace)
        if kind is None or not local:
            raise ModelError(f"node id {node_id!r} has no recognised namespace")
        if as_function and namespace == "anat":
            kind = NodeKind.ANATOMICAL_FUNCTION
        flavor = DiagnosisFlavor.EXPLICIT if kind is NodeKind.DIAGNOSIS else None
        return Node(node_id, kind, local, None, flavor, False)

    # -- triples -------------------------------------------------------------

    @property
    def triples(self) -> dict[Triple, Partition]:
        return self._triples

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def partition_of(self, triple: Triple) -> Partition:
        try:
            return self._triples[triple]
        except KeyError:
            raise ModelError(f"triple not in graph: {triple}") from None

    def add_triple(self, triple: Triple, partition: Partition) -> None:
        """Insert one triple. Idempotent; raises ModelError on any table clash.

        Missing endpoint nodes are auto-created with their namespace's default
        kind (object of hasFunction becomes a function).
        """
        subject_kinds, object_kinds, literal_policy = _RELATION_TABLE[triple.relation]
        if partition not in _PARTITIONS_BY_RELATION[triple.relation]:
            raise ModelError(
                f"relation {triple.relation.value} cannot live in partition {partition.value}"
            )

        subject = self._nodes.get(triple.subject)
        if subject is None:
            subject = self._default_node(triple.subject)
            self._nodes[triple.subject] = subject
        if subject.kind not in subject_kinds:
            raise ModelError(
                f"{triple.relation.value} subject {triple.subject} has kind "
                f"{subject.kind.value}"
            )

        if isinstance(triple.obj, Literal):
            if literal_policy == "never":
                raise ModelError(
                    f"{triple.relation.value} cannot carry a literal object"
                )
        else:
            if literal_policy == "required":
                raise ModelError(f"{triple.relation.value} requires a literal object")
            obj = self._nodes.get(triple.obj)
            if obj is None:
                obj = self._default_node(
                    triple.obj, as_function=triple.relation is Relation.HAS_FUNCTION
                )
                self._nodes[triple.obj] = obj
            if obj.kind not in object_kinds:
                raise ModelError(
                    f"{triple.relation.value} object {triple.obj} has kind {obj.kind.value}"
                )

        if triple.relation is Relation.ASSOCIATED_WITH:
            wanted = Partition.PSO if subject.kind is NodeKind.SYMPTOM else Partition.POO
            if partition is not wanted:
                raise ModelError(
                    f"associatedWith from a {subject.kind.value} belongs in {wanted.value}"
                )

        previous = self._triples.get(triple)
        if previous is not None and previous is not partition:
            raise ModelError(f"triple already present in partition {previous.value}")
        self._triples[triple] = partition

    def remove_triple(self, triple: Triple) -> None:
        try:
            del self._triples[triple]
        except KeyError:
            raise ModelError(f"triple not in graph: {triple}") from None

    # -- views ---------------------------------------------------------------

    def partition_counts(self) -> dict[str, int]:
        counts = {p.value: 0 for p in Partition}
        for partition in self._triples.values():
            counts[partition.value] += 1
        return counts

    def partition_subgraph(self, partition: Partition) -> "MgoGraph":
        """Subgraph of one partition's triples plus the nodes they reference."""
        sub = MgoGraph()
        for triple, tag in self._triples.items():
            if tag is not partition:
                continue
            sub._nodes.setdefault(triple.subject, self._nodes[triple.subject].copy())
            if not isinstance(triple.obj, Literal):
                sub._nodes.setdefault(triple.obj, self._nodes[triple.obj].copy())
            sub._triples[triple] = tag
        return sub

    def structure_root(self) -> str | None:
        """The unique structure with no isPartOf out-edge, if identifiable.

        With several candidates the one with the most transitive part-of
        descendants wins (tie: lowest id); None on an empty structure set.
        """
        structures = [
            nid for nid, n in self._nodes.items() if n.kind is NodeKind.ANATOMICAL_STRUCTURE
        ]
        if not structures:
            return None
        has_parent = {
            t.subject for t in self._triples if t.relation is Relation.IS_PART_OF
        }
        candidates = [nid for nid in structures if nid not in has_parent]
        if not candidates:
            return None
        if len(candidates) == 1:
            return candidates[0]
        children: dict[str, list[str]] = {}
        for triple in self._triples:
            if triple.relation is Relation.IS_PART_OF and isinstance(triple.obj, str):
                children.setdefault(triple.obj, []).append(triple.subject)

        def descendants(root: str) -> int:
            seen: set[str] = set()
            frontier = [root]
            while frontier:
                for child in children.get(frontier.pop(), ()):
                    if child not in seen:
                        seen.add(child)
                        frontier.append(child)
            return len(seen)

        return min(candidates, key=lambda nid: (-descendants(nid), nid))

    def copy(self) -> "MgoGraph":
        clone = MgoGraph()
        clone._nodes = {nid: node.copy() for nid, node in self._nodes.items()}
        clone._triples = dict(self._triples)
        return clone

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MgoGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._triples == other._triples

    def __repr__(self) -> str:
        return f"<{type(self).__name__} nodes={len(self._nodes)} triples={len(self._triples)}>"


class PatientGraph(MgoGraph):
    """Interpretation result: a consultation subgraph with per-triple anchors.

    ``anchors`` maps each retained triple to the ontology triple it
    instantiates.
    """

    def __init__(self) -> None:
        super().__init__()
        self.anchors: dict[Triple, Triple] = {}

    def record(self, triple: Triple, partition: Partition, anchor: Triple) -> None:
        self.add_triple(triple, partition)
        self.anchors[triple] = anchor

    def __eq__(self, other: object) -> bool:
        base = super().__eq__(other)
        if base is NotImplemented or not base:
            return base
        other_anchors = getattr(other, "anchors", None)
        return other_anchors == self.anchors


def union(graphs: Iterable[MgoGraph]) -> MgoGraph:
    """Union of graphs: merged node sets, merged partition-tagged triples.

    Associative and commutative; node id collisions with differing data are
    merge errors. The union of nothing is the empty graph.
    """
    result = MgoGraph()
    for graph in graphs:
        for node in graph.nodes.values():
            existing = result._nodes.get(node.id)
            if existing is None:
                result._nodes[node.id] = node.copy()
            elif (
                existing.kind is not node.kind
                or existing.label != node.label
                or existing.concept_id != node.concept_id
                or existing.flavor is not node.flavor
                or existing.curated != node.curated
            ):
                raise ModelError(f"merge conflict on node {node.id}")
        for triple, partition in graph.triples.items():
            result.add_triple(triple, partition)
    return result
