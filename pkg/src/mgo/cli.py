"""Command-line front-end for the guideline ontology pipeline."""

from __future__ import annotations

import functools
import json
import sys

import click

from .builder import build_mgo
from .curation import CurationDecisions, enqueue_candidates
from .errors import MgoError
from .guideline import load_heading_map, parse_guideline
from .interpreter import interpret, load_consultation, reduction_ratio
from .serializer import from_ntriples, to_json_graph, to_ntriples, to_turtle
from .terminology import load_snapshot
from .validator import to_json_lines, validate

_in_path = click.Path(exists=True, dir_okay=False)
_out_path = click.Path(dir_okay=False, writable=True)


def _pipeline(command):
    """Turn pipeline failures into exit-1 errors on standard error."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except MgoError as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def _load_inputs(guideline: str, terminology: str, heading_map: str | None):
    mapping = load_heading_map(heading_map) if heading_map else None
    return parse_guideline(guideline, mapping), load_snapshot(terminology)


def _read_graph(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        return from_ntriples(handle.read(), path=path)


@click.group()
def main() -> None:
    """Compile sectioned medical guidelines into validated ontologies."""


@main.command()
@click.option("--guideline", required=True, type=_in_path, help="Sectioned guideline document.")
@click.option("--terminology", required=True, type=_in_path, help="Terminology snapshot TSV.")
@click.option("--decisions", type=_in_path, default=None, help="Curator decision log (JSONL).")
@click.option("--heading-map", type=_in_path, default=None, help="Heading-to-section-kind JSON.")
@click.option("--out", required=True, type=_out_path, help="Output graph (.nt).")
@click.option(
    "--strict-algorithm",
    is_flag=True,
    help="No section gating, link every clinical phrase to every anatomy node.",
)
@_pipeline
def build(guideline, terminology, decisions, heading_map, out, strict_algorithm) -> None:
    """Build the ontology and print the build report."""
    doc, snapshot = _load_inputs(guideline, terminology, heading_map)
    log = CurationDecisions.load(decisions) if decisions else CurationDecisions()
    graph, report = build_mgo(doc, snapshot, log, strict=strict_algorithm)
    with open(out, "w", encoding="utf-8") as handle:
        handle.write(to_ntriples(graph))
    click.echo(json.dumps(report.to_payload(), indent=2))


@main.command("validate")
@click.option("--graph", "graph_path", required=True, type=_in_path, help="Graph file (.nt).")
@_pipeline
def validate_command(graph_path) -> None:
    """Check a graph; violations as JSON lines, exit 0 only when clean."""
    violations = validate(_read_graph(graph_path))
    if violations:
        click.echo(to_json_lines(violations), nl=False)
        sys.exit(1)


@main.command("interpret")
@click.option("--mgo", "mgo_path", required=True, type=_in_path, help="Ontology graph (.nt).")
@click.option("--consultation", required=True, type=_in_path, help="Consultation graph (.nt).")
@click.option("--out", required=True, type=_out_path, help="Output patient graph (.nt).")
@_pipeline
def interpret_command(mgo_path, consultation, out) -> None:
    """Filter a consultation through an ontology."""
    mgo = _read_graph(mgo_path)
    source = load_consultation(consultation)
    patient = interpret(source, mgo)
    with open(out, "w", encoding="utf-8") as handle:
        handle.write(to_ntriples(patient))
    ratio = reduction_ratio(source, patient)
    click.echo(
        json.dumps(
            {
                "consultation_triples": len(source),
                "patient_triples": len(patient),
                "reduction_ratio": str(ratio),
            },
            indent=2,
        )
    )


@main.command()
@click.option("--guideline", required=True, type=_in_path, help="Sectioned guideline document.")
@click.option("--terminology", required=True, type=_in_path, help="Terminology snapshot TSV.")
@click.option("--heading-map", type=_in_path, default=None, help="Heading-to-section-kind JSON.")
@click.option("--out", required=True, type=_out_path, help="Curation queue output (.jsonl).")
@_pipeline
def candidates(guideline, terminology, heading_map, out) -> None:
    """Write the curation queue as JSON lines."""
    doc, snapshot = _load_inputs(guideline, terminology, heading_map)
    queue = enqueue_candidates(doc, snapshot)
    with open(out, "w", encoding="utf-8") as handle:
        for candidate in queue:
            handle.write(json.dumps(candidate.to_payload()) + "\n")
    pending = sum(1 for c in queue if c.status.value == "pending")
    click.echo(f"{len(queue)} candidates, {pending} pending")


@main.command()
@click.option("--guideline", required=True, type=_in_path, help="Sectioned guideline document.")
@click.option("--terminology", required=True, type=_in_path, help="Terminology snapshot TSV.")
@click.option("--decisions", required=True, type=_out_path, help="Decision log path (JSONL).")
@click.option("--heading-map", type=_in_path, default=None, help="Heading-to-section-kind JSON.")
@click.option("--static", "static_dir", type=click.Path(exists=True, file_okay=False), default=None, help="Review UI directory to serve at /.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8030, show_default=True, type=int)
@_pipeline
def serve(guideline, terminology, decisions, heading_map, static_dir, host, port) -> None:
    """Run the curation service."""
    import uvicorn

    from .service import create_app

    app = create_app(guideline, terminology, decisions, heading_map, static_dir)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as exc:
        raise click.ClickException(f"cannot serve on {host}:{port}: {exc}") from exc


@main.command()
@click.option("--graph", "graph_path", required=True, type=_in_path, help="Graph file (.nt).")
@click.option(
    "--format",
    "fmt",
    required=True,
    type=click.Choice(["ttl", "json"]),
    help="Output format.",
)
@_pipeline
def export(graph_path, fmt) -> None:
    """Convert a graph to Turtle or JSON."""
    graph = _read_graph(graph_path)
    if fmt == "ttl":
        click.echo(to_turtle(graph), nl=False)
    else:
        click.echo(json.dumps(to_json_graph(graph), indent=2))


if __name__ == "__main__":
    main()
