"""HTTP curation service: the review queue and build preview over one
guideline + terminology pair.

All state lives in the inputs and the decision log; the service itself is
a thin, restartable view. Mutations are serialized under one lock and the
log entry is durable on disk before the response leaves.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .builder import build_mgo
from .curation import (
    CandidateStatus,
    CurationDecisions,
    enqueue_candidates,
    with_decisions,
)
from .errors import MgoError, NotFoundError, StateError
from .guideline import load_heading_map, parse_guideline
from .serializer import to_json_graph
from .terminology import load_snapshot
from .validator import validate

__all__ = ["create_app"]


class _ServiceState:
    def __init__(
        self,
        guideline_path: str,
        terminology_path: str,
        decisions_path: str | None,
        heading_map_path: str | None,
    ) -> None:
        heading_map = load_heading_map(heading_map_path) if heading_map_path else None
        self.doc = parse_guideline(guideline_path, heading_map)
        self.snapshot = load_snapshot(terminology_path)
        self.decisions = (
            CurationDecisions.load(decisions_path)
            if decisions_path is not None
            else CurationDecisions()
        )
        self.candidates = enqueue_candidates(self.doc, self.snapshot)
        known = {c.id for c in self.candidates}
        stale = set(self.decisions.effective()) - known
        if stale:
            raise StateError(
                "decision log does not match the guideline: unknown mapping ids "
                + ", ".join(sorted(stale))
                + "; remove those entries or restore the original guideline to recover"
            )
        self.lock = threading.Lock()
        self._built_revision: int | None = None
        self._graph = None
        self._report = None

    def build(self):
        with self.lock:
            if self._built_revision != self.decisions.revision:
                graph, report = build_mgo(self.doc, self.snapshot, self.decisions)
                self._graph = graph
                self._report = report
                self._built_revision = self.decisions.revision
            return self._graph, self._report

    def decide(self, mapping_id: str, status: CandidateStatus, concept: int | None):
        with self.lock:
            if not any(c.id == mapping_id for c in self.candidates):
                raise NotFoundError(f"no candidate mapping with id {mapping_id}")
            self.decisions.apply(mapping_id, status, concept)

    def merged_candidates(self):
        return with_decisions(self.candidates, self.decisions)


def create_app(
    guideline_path: str,
    terminology_path: str,
    decisions_path: str | None = None,
    heading_map_path: str | None = None,
    static_dir: str | None = None,
) -> FastAPI:
    """Wire the curation endpoints over the given inputs.

    With ``static_dir`` set, the directory is served at the root so the
    review UI and its API share an origin.
    """
    state = _ServiceState(guideline_path, terminology_path, decisions_path, heading_map_path)
    app = FastAPI(title="guideline curation service", docs_url=None, redoc_url=None)

    @app.exception_handler(NotFoundError)
    async def _not_found(request: Request, exc: NotFoundError) -> JSONResponse:
        return JSONResponse({"error": str(exc)}, status_code=404)

    @app.exception_handler(MgoError)
    async def _pipeline_error(request: Request, exc: MgoError) -> JSONResponse:
        return JSONResponse({"error": str(exc)}, status_code=500)

    @app.get("/api/candidates")
    def candidates(status: str | None = None):
        merged = state.merged_candidates()
        if status is not None:
            try:
                wanted = CandidateStatus(status)
            except ValueError:
                return JSONResponse(
                    {"error": f"unknown status filter {status!r}"}, status_code=400
                )
            merged = [c for c in merged if c.status is wanted]
        return [c.to_payload() for c in merged]

    @app.post("/api/decisions")
    async def decide(request: Request):
        body = await request.json()
        if not isinstance(body, dict) or "id" not in body or "status" not in body:
            return JSONResponse(
                {"error": "body must carry id and status"}, status_code=400
            )
        try:
            status = CandidateStatus(body["status"])
        except ValueError:
            return JSONResponse(
                {"error": f"unknown status {body['status']!r}"}, status_code=400
            )
        if status is CandidateStatus.PENDING:
            return JSONResponse(
                {"error": "a decision must accept or reject"}, status_code=400
            )
        concept = body.get("concept")
        if concept is not None and not isinstance(concept, int):
            return JSONResponse({"error": "concept must be an integer"}, status_code=400)
        if status is CandidateStatus.REJECTED and concept is not None:
            return JSONResponse(
                {"error": "a rejection cannot carry a concept"}, status_code=400
            )
        state.decide(body["id"], status, concept)
        updated = next(c for c in state.merged_candidates() if c.id == body["id"])
        return {"revision": state.decisions.revision, "candidate": updated.to_payload()}

    @app.get("/api/preview")
    def preview():
        _, report = state.build()
        return report.to_payload()

    @app.get("/api/graph")
    def graph():
        built, _ = state.build()
        return to_json_graph(built)

    @app.get("/api/validate")
    def validate_endpoint():
        built, _ = state.build()
        return [
            {"rule": v.rule_id, "elements": list(v.elements), "message": v.message}
            for v in validate(built)
        ]

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
