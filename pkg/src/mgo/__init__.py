"""Semi-automated compilation of medical guidelines into ontologies.

The pipeline reads a sectioned guideline document and a terminology
snapshot, extracts concept mentions, assembles a five-partition ontology
(anatomy, symptoms, observations, diagnosis, treatments), validates it,
and interprets consultation graphs against it. Ambiguous or unmatched
phrases go through a human curation queue whose decisions replay
deterministically.
"""

from .builder import (
    AnatomyMentionSet,
    BuildReport,
    build_clinical,
    build_mgo,
    build_pao,
    collect_anatomy,
    resolve_condition,
)
from .chunker import (
    Phrase,
    extract_noun_phrases,
    normalize,
    scrub,
    split_sentences,
    tokenize,
)
from .curation import (
    CandidateConcept,
    CandidateMapping,
    CandidateStatus,
    CurationDecisions,
    Decision,
    apply_decision,
    enqueue_candidates,
    mapping_id,
    resolve_automatically,
    score_candidates,
    with_decisions,
)
from .errors import (
    BuildError,
    ConfigError,
    IntegrityError,
    InterpretationError,
    MgoError,
    ModelError,
    NotFoundError,
    ParseError,
    PreconditionError,
    StateError,
    VocabularyError,
)
from .guideline import (
    GuidelineDoc,
    Section,
    SectionKind,
    Sentence,
    load_heading_map,
    parse_guideline,
)
from .interpreter import interpret, load_consultation, reduction_ratio
from .model import (
    DiagnosisFlavor,
    Literal,
    MgoGraph,
    Node,
    NodeKind,
    Partition,
    PatientGraph,
    Relation,
    Triple,
    union,
)
from .serializer import from_ntriples, to_json_graph, to_ntriples, to_turtle
from .terminology import (
    Concept,
    HierarchyKind,
    TerminologySnapshot,
    load_snapshot,
)
from .validator import Violation, explain, to_json_lines, validate

__version__ = "0.1.0"

__all__ = [
    "AnatomyMentionSet",
    "BuildError",
    "BuildReport",
    "CandidateConcept",
    "CandidateMapping",
    "CandidateStatus",
    "Concept",
    "ConfigError",
    "CurationDecisions",
    "Decision",
    "DiagnosisFlavor",
    "GuidelineDoc",
    "HierarchyKind",
    "IntegrityError",
    "InterpretationError",
    "Literal",
    "MgoError",
    "MgoGraph",
    "ModelError",
    "Node",
    "NodeKind",
    "NotFoundError",
    "ParseError",
    "Partition",
    "PatientGraph",
    "Phrase",
    "PreconditionError",
    "Relation",
    "Section",
    "SectionKind",
    "Sentence",
    "StateError",
    "TerminologySnapshot",
    "Triple",
    "Violation",
    "VocabularyError",
    "apply_decision",
    "build_clinical",
    "build_mgo",
    "build_pao",
    "collect_anatomy",
    "enqueue_candidates",
    "explain",
    "extract_noun_phrases",
    "from_ntriples",
    "interpret",
    "load_consultation",
    "load_heading_map",
    "load_snapshot",
    "mapping_id",
    "normalize",
    "parse_guideline",
    "reduction_ratio",
    "resolve_automatically",
    "resolve_condition",
    "score_candidates",
    "scrub",
    "split_sentences",
    "to_json_graph",
    "to_json_lines",
    "to_ntriples",
    "to_turtle",
    "tokenize",
    "union",
    "validate",
    "with_decisions",
]
