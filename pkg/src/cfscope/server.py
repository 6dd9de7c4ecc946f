"""HTTP facade over sessions. Every payload that embeds bins or arrows carries
the session's scheme fingerprint so clients can detect staleness."""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException, Query

from .aggregate import aggregate_to_json_dict
from .cohort import SORT_KEYS, SORT_MEDIAN_DIFFERENCE, FilterSet
from .data import CATEGORICAL
from .engine import AlgorithmConfig
from .errors import UnknownRow, UnknownSession, WorkbenchError
from .session import (
    COHORT_NAMES,
    Session,
    create_session,
    load_session,
    save_session,
    update_config,
)


class SessionRegistry:
    """In-memory session store, optionally persisted to a directory."""

    def __init__(self, session_dir: str | Path | None = None) -> None:
        self.session_dir = Path(session_dir) if session_dir else None
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def add(self, session: Session) -> None:
        with self._registry_lock:
            self._sessions[session.session_id] = session
            self._locks[session.session_id] = threading.Lock()
        if self.session_dir:
            save_session(session, self.session_dir)

    def get(self, session_id: str) -> Session:
        with self._registry_lock:
            if session_id in self._sessions:
                return self._sessions[session_id]
        if self.session_dir:
            path = self.session_dir / f"{session_id}.json"
            if path.exists():
                session = load_session(path)
                with self._registry_lock:
                    self._sessions.setdefault(session.session_id, session)
                    self._locks.setdefault(session.session_id, threading.Lock())
                return self._sessions[session_id]
        raise UnknownSession(session_id)

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            if session_id not in self._locks:
                raise UnknownSession(session_id)
            return self._locks[session_id]

    def persist(self, session: Session) -> None:
        if self.session_dir:
            save_session(session, self.session_dir)


def _schema_payload(session: Session) -> dict:
    features = []
    for feature in session.dataset.schema:
        entry: dict = {"name": feature.name, "kind": feature.kind}
        if feature.kind == CATEGORICAL:
            entry["categories"] = list(feature.categories or ())
        if feature.display_unit:
            entry["display_unit"] = feature.display_unit
        features.append(entry)
    return {
        "fingerprint": session.fingerprint,
        "schema": {
            "label_column": session.dataset.label_column,
            "positive_label": session.dataset.positive_label_name,
            "negative_label": session.dataset.negative_label_name,
            "features": features,
        },
        "scheme": session.scheme.to_json_dict(),
        "bin_count": session.bin_count,
        "threshold": session.decision.threshold,
        "rows": len(session.dataset),
    }


def _filter_payload(session: Session, name: str) -> dict:
    row_ids = session.cohort(name)
    summary = session.summary(name)
    return {
        "fingerprint": session.fingerprint,
        "cohort": name,
        "filter": session.filters[name].to_json_dict(),
        "row_ids": row_ids,
        "summary": summary.to_json_dict(),
    }


def create_app(
    session_dir: str | Path | None = None, ui_dir: str | Path | None = None
) -> FastAPI:
    app = FastAPI(title="cfscope", version="0.1.0")
    registry = SessionRegistry(session_dir)
    app.state.registry = registry

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    def fetch(session_id: str) -> Session:
        try:
            return registry.get(session_id)
        except UnknownSession:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")

    def check_cohort(name: str) -> str:
        if name not in COHORT_NAMES:
            raise HTTPException(status_code=404, detail=f"unknown cohort {name!r}")
        return name

    @app.exception_handler(WorkbenchError)
    def _workbench_error(request, exc: WorkbenchError):  # pragma: no cover - thin glue
        from fastapi.responses import JSONResponse

        return JSONResponse(
            status_code=400,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.post("/sessions")
    def post_session(payload: dict = Body(...)) -> dict:
        schema_spec = payload.get("schema_spec") or payload.get("schema_path")
        if schema_spec is None:
            raise HTTPException(status_code=400, detail="missing schema_spec or schema_path")
        try:
            session = create_session(
                dataset_path=payload["dataset_path"],
                schema_spec=schema_spec,
                model_spec=payload.get("model_spec", {"kind": "logistic"}),
                overrides=payload.get("config"),
            )
        except OSError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        registry.add(session)
        return {"session_id": session.session_id, "fingerprint": session.fingerprint}

    @app.get("/sessions/{session_id}/schema")
    def get_schema(session_id: str) -> dict:
        return _schema_payload(fetch(session_id))

    @app.get("/sessions/{session_id}/filters/{name}")
    def get_filter(session_id: str, name: str) -> dict:
        return _filter_payload(fetch(session_id), check_cohort(name))

    @app.put("/sessions/{session_id}/filters/{name}")
    def put_filter(session_id: str, name: str, payload: dict = Body(...)) -> dict:
        session = fetch(session_id)
        name = check_cohort(name)
        try:
            filterset = FilterSet.from_json_dict(payload)
        except (ValueError, KeyError, TypeError) as exc:
            raise HTTPException(status_code=400, detail=f"bad filter: {exc}")
        session.set_filter(name, filterset)
        registry.persist(session)
        return _filter_payload(session, name)

    @app.get("/sessions/{session_id}/compare")
    def get_compare(
        session_id: str, sort: str = Query(default=SORT_MEDIAN_DIFFERENCE)
    ) -> dict:
        session = fetch(session_id)
        if sort not in SORT_KEYS:
            raise HTTPException(status_code=400, detail=f"unknown sort key {sort!r}")
        comparison = session.compare(sort)
        return {
            "fingerprint": session.fingerprint,
            "sort": sort,
            "order": comparison["order"],
            "a": comparison["a"].to_json_dict(),
            "b": comparison["b"].to_json_dict(),
        }

    @app.get("/sessions/{session_id}/aggregate/{name}")
    def get_aggregate(session_id: str, name: str) -> dict:
        session = fetch(session_id)
        aggregate, unexplained = session.cohort_aggregate(check_cohort(name))
        payload = aggregate_to_json_dict(aggregate, session.dataset)
        payload["cohort"] = name
        payload["unexplained"] = unexplained
        return payload

    @app.get("/sessions/{session_id}/explanations/{row_id}")
    def get_explanation(session_id: str, row_id: int) -> dict:
        session = fetch(session_id)
        try:
            expl = session.detail(row_id)
        except UnknownRow as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        doc = expl.to_json_dict()
        doc["fingerprint"] = session.fingerprint
        return doc

    @app.get("/sessions/{session_id}/slice")
    def get_slice(
        session_id: str,
        cohort: str = Query(...),
        feature: int = Query(...),
        bin: int = Query(...),
    ) -> dict:
        session = fetch(session_id)
        rows = session.slice(check_cohort(cohort), feature, bin)
        return {
            "fingerprint": session.fingerprint,
            "cohort": cohort,
            "feature": feature,
            "bin": bin,
            "rows": [{"row_id": r.row_id, "values": list(r.values)} for r in rows],
        }

    @app.put("/sessions/{session_id}/config")
    def put_config(session_id: str, payload: dict = Body(...)) -> dict:
        session = fetch(session_id)
        algorithm = None
        if "algorithm" in payload:
            base = session.algorithm.to_json_dict()
            base.update(payload["algorithm"])
            algorithm = AlgorithmConfig.from_json_dict(base)
        bin_count = payload.get("bin_count")
        # config updates are single-writer per session
        with registry.lock(session_id):
            report = update_config(
                session,
                algorithm=algorithm,
                bin_count=int(bin_count) if bin_count is not None else None,
            )
            registry.persist(session)
        return report

    return app
