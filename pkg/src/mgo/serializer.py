"""Canonical text formats for graphs.

The wire format is line-based N-Triples over ``urn:mgo:`` IRIs, sorted
lexicographically so equal graphs serialize byte-identically. Node metadata
(concept links, display labels, diagnosis flavor, curation marks) rides along
as annotation triples in the ``rel:`` namespace.
"""

from __future__ import annotations

import json
import re

from .errors import ParseError, VocabularyError
from .model import (
    DEFAULT_KIND_BY_NAMESPACE,
    DiagnosisFlavor,
    Literal,
    MgoGraph,
    Node,
    NodeKind,
    Partition,
    Relation,
    Triple,
)

__all__ = ["to_ntriples", "from_ntriples", "to_turtle", "to_json_graph"]

_IRI_PREFIX = "urn:mgo:"
_REL_PREFIX = "urn:mgo:rel:"

_ANNOTATIONS = frozenset({"snomedConcept", "label", "flavor", "curated"})
_RELATION_BY_NAME = {r.value: r for r in Relation}

_PARTITION_BY_RELATION = {
    Relation.IS_PART_OF: Partition.PAO,
    Relation.HAS_FUNCTION: Partition.PAO,
    Relation.HAS_SYMPTOM: Partition.PSO,
    Relation.HAS_OBSERVATION: Partition.POO,
    Relation.DIAGNOSED_WITH: Partition.PDO,
    Relation.TREATED_WITH: Partition.PTO,
    Relation.HAS_TREATMENT: Partition.PTO,
    Relation.SYMPTOM: Partition.PSO,
    Relation.OBSERVATION: Partition.POO,
}

_LINE = re.compile(
    r'^<([^<>\s]+)>\s+<([^<>\s]+)>\s+(?:<([^<>\s]+)>|"((?:[^"\\]|\\.)*)")\s+\.$'
)

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}
_UNESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}


def _quote(text: str) -> str:
    return '"' + "".join(_ESCAPES.get(ch, ch) for ch in text) + '"'


def _unquote(raw: str, line_no: int) -> str:
    out: list[str] = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch == "\\":
            if i + 1 >= len(raw) or raw[i + 1] not in _UNESCAPES:
                raise ParseError("bad escape sequence in literal", line=line_no)
            out.append(_UNESCAPES[raw[i + 1]])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _iri(node_id: str) -> str:
    return f"<{_IRI_PREFIX}{node_id}>"


def _node_ref(iri: str, line_no: int) -> str:
    if not iri.startswith(_IRI_PREFIX):
        raise ParseError(f"IRI outside the urn:mgo: scheme: <{iri}>", line=line_no)
    node_id = iri[len(_IRI_PREFIX):]
    namespace, _, local = node_id.partition(":")
    if namespace not in DEFAULT_KIND_BY_NAMESPACE or not local:
        raise ParseError(f"unknown namespace in <{iri}>", line=line_no)
    return node_id


def _local_name(node_id: str) -> str:
    return node_id.partition(":")[2]


def _annotation_lines(node: Node) -> list[str]:
    lines: list[str] = []
    subject = _iri(node.id)
    if node.concept_id is not None:
        lines.append(f"{subject} <{_REL_PREFIX}snomedConcept> {_quote(str(node.concept_id))} .")
    if node.label != _local_name(node.id):
        lines.append(f"{subject} <{_REL_PREFIX}label> {_quote(node.label)} .")
    if node.flavor is DiagnosisFlavor.IMPLICIT:
        lines.append(f"{subject} <{_REL_PREFIX}flavor> {_quote('implicit')} .")
    if node.curated:
        lines.append(f"{subject} <{_REL_PREFIX}curated> {_quote('true')} .")
    return lines


def to_ntriples(graph: MgoGraph) -> str:
    """Serialize to canonical N-Triples: sorted lines, trailing newline.

    The empty graph serializes to the empty string.
    """
    lines: list[str] = []
    for triple in graph.triples:
        if isinstance(triple.obj, Literal):
            obj = _quote(triple.obj.text)
        else:
            obj = _iri(triple.obj)
        lines.append(f"{_iri(triple.subject)} <{_REL_PREFIX}{triple.relation.value}> {obj} .")
    for node in graph.nodes.values():
        lines.extend(_annotation_lines(node))
    if not lines:
        return ""
    return "\n".join(sorted(lines)) + "\n"


def from_ntriples(text: str, path: str | None = None) -> MgoGraph:
    """Parse canonical N-Triples back into a graph.

    Unknown relations in the rel: namespace raise VocabularyError; anything
    else malformed raises ParseError with the offending line number.
    """
    statements: list[tuple[int, str, Relation, str | Literal]] = []
    annotations: list[tuple[int, str, str, str]] = []
    node_ids: set[str] = set()

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        match = _LINE.match(line)
        if match is None:
            raise ParseError(f"not an N-Triples statement: {line!r}", path=path, line=line_no)
        subject_iri, predicate_iri, object_iri, object_text = match.groups()
        try:
            subject = _node_ref(subject_iri, line_no)
            if not predicate_iri.startswith(_REL_PREFIX):
                raise ParseError(
                    f"predicate outside the rel: namespace: <{predicate_iri}>", line=line_no
                )
            name = predicate_iri[len(_REL_PREFIX):]
            if name in _ANNOTATIONS:
                if object_iri is not None:
                    raise ParseError(
                        f"annotation {name} requires a literal object", line=line_no
                    )
                annotations.append((line_no, subject, name, _unquote(object_text, line_no)))
                node_ids.add(subject)
                continue
            relation = _RELATION_BY_NAME.get(name)
            if relation is None:
                raise VocabularyError(f"unknown relation {name!r}", line=line_no)
            if object_iri is not None:
                obj: str | Literal = _node_ref(object_iri, line_no)
                node_ids.add(obj)
            else:
                obj = Literal(_unquote(object_text, line_no))
            node_ids.add(subject)
            statements.append((line_no, subject, relation, obj))
        except ParseError as exc:
            if path is not None and exc.path is None:
                raise type(exc)(exc.bare_message, path=path, line=exc.line) from None
            raise

    # pass two: settle node kinds before inserting anything
    kinds: dict[str, NodeKind] = {
        nid: DEFAULT_KIND_BY_NAMESPACE[nid.partition(":")[0]] for nid in node_ids
    }
    symptom_instances: set[str] = set()
    observation_instances: set[str] = set()
    for _, subject, relation, obj in statements:
        if relation is Relation.HAS_FUNCTION and isinstance(obj, str):
            kinds[obj] = NodeKind.ANATOMICAL_FUNCTION
        elif relation is Relation.HAS_SYMPTOM and isinstance(obj, str):
            if kinds.get(obj) is NodeKind.INSTANCE:
                symptom_instances.add(obj)
        elif relation is Relation.HAS_OBSERVATION and isinstance(obj, str):
            if kinds.get(obj) is NodeKind.INSTANCE:
                observation_instances.add(obj)
        elif relation is Relation.SYMPTOM:
            symptom_instances.add(subject)
        elif relation is Relation.OBSERVATION:
            observation_instances.add(subject)

    graph = MgoGraph()
    by_node: dict[str, dict[str, str]] = {}
    for line_no, subject, name, value in annotations:
        bucket = by_node.setdefault(subject, {})
        if name in bucket and bucket[name] != value:
            raise ParseError(
                f"conflicting {name} annotations on {subject}", path=path, line=line_no
            )
        bucket[name] = value

    for nid in sorted(node_ids):
        kind = kinds[nid]
        meta = by_node.get(nid, {})
        concept_id: int | None = None
        if "snomedConcept" in meta:
            try:
                concept_id = int(meta["snomedConcept"])
            except ValueError:
                raise ParseError(
                    f"snomedConcept on {nid} is not an integer", path=path
                ) from None
        flavor: DiagnosisFlavor | None = None
        if "flavor" in meta:
            if kind is not NodeKind.DIAGNOSIS:
                raise ParseError(f"flavor annotation on non-diagnosis node {nid}", path=path)
            if meta["flavor"] != DiagnosisFlavor.IMPLICIT.value:
                raise ParseError(
                    f"unsupported flavor {meta['flavor']!r} on {nid}", path=path
                )
            flavor = DiagnosisFlavor.IMPLICIT
        curated = False
        if "curated" in meta:
            if meta["curated"] != "true":
                raise ParseError(f"curated annotation on {nid} must be \"true\"", path=path)
            curated = True
        graph.add_node(
            kind,
            meta.get("label", _local_name(nid)),
            concept_id=concept_id,
            flavor=flavor,
            curated=curated,
            node_id=nid,
        )

    for line_no, subject, relation, obj in statements:
        if relation is Relation.ASSOCIATED_WITH:
            partition = (
                Partition.PSO
                if graph.node(subject).kind is NodeKind.SYMPTOM
                else Partition.POO
            )
        elif relation is Relation.HAS_VALUE:
            partition = Partition.POO if subject in observation_instances else Partition.PSO
        else:
            partition = _PARTITION_BY_RELATION[relation]
        try:
            graph.add_triple(Triple(subject, relation, obj), partition)
        except Exception as exc:
            raise ParseError(str(exc), path=path, line=line_no) from None
    return graph


def to_turtle(graph: MgoGraph) -> str:
    """Prefixed Turtle view of the same statements (read-oriented)."""
    prefixes = sorted(set(DEFAULT_KIND_BY_NAMESPACE) | {"rel"})
    header = [f"@prefix {ns}: <{_IRI_PREFIX}{ns}:> ." for ns in prefixes]
    nt = to_ntriples(graph)
    body: list[str] = []
    for line in nt.splitlines():
        match = _LINE.match(line)
        assert match is not None
        parts = []
        subject_iri, predicate_iri, object_iri, object_text = match.groups()
        parts.append(subject_iri[len(_IRI_PREFIX):])
        parts.append("rel:" + predicate_iri[len(_REL_PREFIX):])
        if object_iri is not None:
            parts.append(object_iri[len(_IRI_PREFIX):])
        else:
            parts.append(f'"{object_text}"')
        body.append(" ".join(parts) + " .")
    sections = header + ([""] + body if body else [])
    return "\n".join(sections) + "\n"


def to_json_graph(graph: MgoGraph) -> dict:
    """Node-link dict for API payloads and UI rendering."""
    nodes = []
    for node in sorted(graph.nodes.values(), key=lambda n: n.id):
        nodes.append(
            {
                "id": node.id,
                "kind": node.kind.value,
                "label": node.label,
                "concept": node.concept_id,
                "flavor": node.flavor.value if node.flavor is not None else None,
                "curated": node.curated,
            }
        )
    edges = []
    for triple, partition in graph.triples.items():
        edge = {
            "src": triple.subject,
            "rel": triple.relation.value,
            "partition": partition.value,
        }
        if isinstance(triple.obj, Literal):
            edge["dst"] = triple.obj.text
            edge["literal"] = True
        else:
            edge["dst"] = triple.obj
        edges.append(edge)
    edges.sort(key=lambda e: (e["src"], e["rel"], e["dst"]))
    return {"nodes": nodes, "edges": edges}


def json_dumps(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"
