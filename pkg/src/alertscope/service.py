"""HTTP/JSON API over the store, graph explorer and session history.

The API is a thin shim: every endpoint delegates to the same query code the
CLI uses and returns its JSON form. Errors map to 4xx/5xx with a
machine-readable code. History trees live server-side, keyed by a session
id carried in the X-Session-Id header, and are persisted per mutation so a
reconnecting console recovers its history.
"""

from __future__ import annotations

import json
import secrets
import threading
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Header, Query, Request
from fastapi.responses import JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles

from . import wire
from .errors import (
    AlertscopeError,
    EmptySelectionError,
    HandleError,
    ParseError,
    RangeError,
    SpecError,
    UnknownNodeError,
)
from .graph import build_graph, edge_alerts, node_history
from .history import ExplorationState, HistoryTree, build_label
from .model import TimeRange
from .store import AlertStore, FacetSpec, GridSpec, GridView

_STATUS = {
    HandleError: 404,
    UnknownNodeError: 404,
    SpecError: 400,
    RangeError: 400,
    ParseError: 400,
    EmptySelectionError: 400,
}


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    data_dir: Path = Path("data")
    static_dir: Path | None = None
    log_level: str = "info"


def load_store(data_dir: Path) -> AlertStore:
    """Build a store from <data_dir>/alerts.jsonl, applying
    <data_dir>/exclusions.json when present."""
    store = AlertStore()
    alerts_path = data_dir / "alerts.jsonl"
    if alerts_path.exists():
        with alerts_path.open() as fh:
            store.ingest(wire.read_jsonl(fh))
    exclusions_path = data_dir / "exclusions.json"
    if exclusions_path.exists():
        store.set_exclusions(wire.exclusions_from_json(json.loads(exclusions_path.read_text())))
    return store


class SessionHub:
    """Server-side history trees, one per session id."""

    def __init__(self, sessions_dir: Path) -> None:
        self.dir = sessions_dir
        self.dir.mkdir(parents=True, exist_ok=True)
        self._trees: dict[str, HistoryTree] = {}
        self._lock = threading.Lock()

    def create(self) -> str:
        session_id = secrets.token_hex(8)
        with self._lock:
            self._trees[session_id] = HistoryTree()
        self._persist(session_id)
        return session_id

    def tree(self, session_id: str) -> HistoryTree:
        with self._lock:
            tree = self._trees.get(session_id)
            if tree is None:
                path = self.dir / f"{session_id}.json"
                if not path.exists():
                    raise HandleError(f"unknown session {session_id!r}")
                tree = HistoryTree.load(path.read_bytes())
                self._trees[session_id] = tree
            return tree

    def _persist(self, session_id: str) -> None:
        tree = self._trees[session_id]
        (self.dir / f"{session_id}.json").write_bytes(tree.serialize())

    def mutate(self, session_id: str, fn):
        with self._lock:
            tree = self._trees.get(session_id)
        if tree is None:
            tree = self.tree(session_id)
        with self._lock:
            result = fn(tree)
        self._persist(session_id)
        return result


def create_app(
    data_dir: Path | str = "data",
    store: AlertStore | None = None,
    static_dir: Path | str | None = None,
) -> FastAPI:
    data_dir = Path(data_dir)
    if store is None:
        store = load_store(data_dir)
    sessions = SessionHub(data_dir / "sessions")
    app = FastAPI(title="alertscope", docs_url=None, redoc_url=None)
    app.state.store = store
    app.state.sessions = sessions

    @app.exception_handler(AlertscopeError)
    async def _domain_error(request: Request, exc: AlertscopeError):
        status = 500
        for cls, code in _STATUS.items():
            if isinstance(exc, cls):
                status = code
                break
        return JSONResponse(
            status_code=status, content={"error": {"code": exc.code, "message": str(exc)}}
        )

    def _time_range(start: str, end: str) -> TimeRange:
        return TimeRange(wire.iso_to_ts(start), wire.iso_to_ts(end))

    @app.get("/api/meta")
    def meta():
        snap = store.snapshot()
        times = snap.time
        return {
            "total_alerts": store.total_alerts(),
            "stored_alerts": int(snap.n),
            "range": {
                "start": wire.ts_to_iso(int(times.min())) if snap.n else None,
                "end": wire.ts_to_iso(int(times.max()) + 1) if snap.n else None,
            },
            "policies": [
                {
                    "policy_id": pid,
                    "severity": int(snap.policy_severity.get(snap.policies.get(pid), 0)),
                }
                for pid in sorted(snap.policies.labels)
            ],
            "exclusions": wire.exclusions_to_json(store.exclusions),
        }

    @app.get("/api/histogram")
    def histogram():
        return store.weekly_histogram()

    @app.get("/api/grid")
    def grid(
        view: str,
        start: str,
        end: str,
        user: str | None = None,
        policies: str | None = None,
        resources: str | None = None,
        top_n: int | None = None,
        offset: int = 0,
    ):
        try:
            grid_view = GridView(view)
        except ValueError as exc:
            raise SpecError(f"unknown grid view {view!r}") from exc
        spec = GridSpec(
            view=grid_view,
            range=_time_range(start, end),
            focus_user=user,
            focus_resources=tuple(resources.split("|")) if resources else None,
            policy_filter=tuple(policies.split(",")) if policies else None,
            top_n=top_n,
            offset=offset,
        )
        return store.grid(spec).to_json()

    @app.get("/api/alerts")
    def alerts(handle: str, format: str = "json"):
        if format == "jsonl":
            return StreamingResponse(store.export(handle, "jsonl"), media_type="application/jsonl")
        return [wire.alert_to_json(a) for a in store.fetch_alerts(handle)]

    @app.get("/api/facet")
    def facet(
        handle: str | None = None,
        ids: str | None = None,
        x: str = Query(...),
        y: str = Query(...),
        color: str | None = None,
    ):
        if handle is None and ids is None:
            raise EmptySelectionError("facet needs a selection handle or alert ids")
        selection = handle if handle is not None else tuple(ids.split(","))
        return store.facet(FacetSpec(selection=selection, x_attr=x, y_attr=y, color_attr=color)).to_json()

    @app.get("/api/graph")
    def graph(seed: str, kind: str, start: str, end: str, permissive: bool = False):
        return build_graph(store, seed, _time_range(start, end), permissive, kind).to_json()

    @app.get("/api/graph/history")
    def graph_history(
        seed: str, kind: str, start: str, end: str, node: str, permissive: bool = False
    ):
        g = build_graph(store, seed, _time_range(start, end), permissive, kind)
        return node_history(store, g, node).to_json()

    @app.get("/api/graph/edge")
    def graph_edge(
        seed: str, kind: str, start: str, end: str, user: str, resource: str, permissive: bool = False
    ):
        g = build_graph(store, seed, _time_range(start, end), permissive, kind)
        return [wire.alert_to_json(a) for a in edge_alerts(store, g, user, resource)]

    @app.get("/api/export")
    def export(handle: str, format: str = "jsonl"):
        media = "text/csv" if format == "csv" else "application/jsonl"
        return StreamingResponse(store.export(handle, format), media_type=media)

    @app.post("/api/session")
    def new_session():
        return {"session_id": sessions.create()}

    def _session(session_id: str | None) -> str:
        if not session_id:
            raise SpecError("history endpoints need an X-Session-Id header")
        return session_id

    @app.get("/api/history")
    def history(x_session_id: str | None = Header(default=None)):
        return sessions.tree(_session(x_session_id)).to_json()

    @app.post("/api/history/record")
    async def history_record(request: Request, x_session_id: str | None = Header(default=None)):
        body = await request.json()
        state_obj = body.get("state") or {}
        if not state_obj.get("label"):
            state_obj["label"] = build_label(body.get("username"), body.get("alert_time"))
        state = ExplorationState.from_json(state_obj)
        node_id = sessions.mutate(_session(x_session_id), lambda t: t.record(state))
        return {"node_id": node_id}

    @app.post("/api/history/restore")
    async def history_restore(request: Request, x_session_id: str | None = Header(default=None)):
        body = await request.json()
        node_id = body.get("node_id")
        state = sessions.mutate(_session(x_session_id), lambda t: t.restore(str(node_id)))
        return {"node_id": node_id, "state": state.to_json()}

    @app.post("/api/history/annotate")
    async def history_annotate(request: Request, x_session_id: str | None = Header(default=None)):
        body = await request.json()
        node_id = str(body.get("node_id"))
        text = str(body.get("text") or "")
        sessions.mutate(_session(x_session_id), lambda t: t.annotate(node_id, text))
        return {"node_id": node_id, "annotation": text or None}

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="console")

    return app


def serve(config: ServiceConfig) -> None:
    import uvicorn

    if not config.data_dir.is_dir():
        raise AlertscopeError(f"data directory {config.data_dir} does not exist")
    app = create_app(config.data_dir, static_dir=config.static_dir)
    uvicorn.run(app, host=config.host, port=config.port, log_level=config.log_level)
