"""HTTP/JSON service backing the composition UI.

Every request works against one immutable workspace snapshot taken at
request start; ``POST /api/reload`` builds a fresh snapshot off to the side
and swaps the reference atomically, so concurrent requests never observe a
half-loaded workspace. Responses are serialized with the same canonical JSON
the CLI emits, so replaying a request against an unchanged snapshot returns
a byte-identical body.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, Request, Response
from fastapi.staticfiles import StaticFiles

from .api import (
    ApiError,
    DataPaths,
    Workspace,
    canonical_json,
    channels_payload,
    config_payload,
    load_workspace,
    parse_compose_request,
    parse_session_request,
    recommend_payload,
    render_payload,
    rulesets_payload,
    templates_payload,
    validate_payload,
)
from .catalog import CatalogError


class SnapshotHolder:
    """Atomic reference to the current workspace snapshot."""

    def __init__(self, workspace: Workspace, loader: Callable[[], Workspace] | None = None):
        self._workspace = workspace
        self._loader = loader
        self._reload_lock = threading.Lock()

    def get(self) -> Workspace:
        return self._workspace

    def reload(self) -> Workspace:
        """Build a fresh snapshot and swap it in. Loading happens outside
        the served reference; on failure the old snapshot stays active."""
        if self._loader is None:
            raise CatalogError([])
        with self._reload_lock:
            workspace = self._loader()
            self._workspace = workspace
        return workspace


def _json_response(payload: object, status: int = 200) -> Response:
    return Response(
        content=canonical_json(payload), status_code=status, media_type="application/json"
    )


def create_app(
    workspace: Workspace,
    loader: Callable[[], Workspace] | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service around an initial snapshot. ``loader`` enables
    ``POST /api/reload``; ``ui_dir`` mounts the composition UI at ``/``."""
    app = FastAPI(title="cmforge", docs_url=None, redoc_url=None, openapi_url=None)
    holder = SnapshotHolder(workspace, loader)
    app.state.holder = holder

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError) -> Response:
        return _json_response(exc.payload(), status=exc.status)

    async def _body(request: Request) -> object:
        try:
            return await request.json()
        except Exception:
            raise ApiError("validation_schema", "request body must be valid JSON") from None

    @app.get("/api/config")
    def get_config() -> Response:
        return _json_response(config_payload())

    @app.get("/api/channels")
    def get_channels() -> Response:
        return _json_response(channels_payload(holder.get()))

    @app.get("/api/templates")
    def get_templates() -> Response:
        return _json_response(templates_payload(holder.get()))

    @app.get("/api/rulesets")
    def get_rulesets() -> Response:
        return _json_response(rulesets_payload(holder.get()))

    @app.post("/api/recommend")
    async def post_recommend(request: Request) -> Response:
        body = await _body(request)
        session = parse_session_request(body)
        return _json_response(recommend_payload(holder.get(), session))

    @app.post("/api/validate")
    async def post_validate(request: Request) -> Response:
        template_id, bindings, channel_id = parse_compose_request(await _body(request))
        return _json_response(validate_payload(holder.get(), template_id, bindings, channel_id))

    @app.post("/api/render")
    async def post_render(request: Request) -> Response:
        template_id, bindings, channel_id = parse_compose_request(await _body(request))
        return _json_response(render_payload(holder.get(), template_id, bindings, channel_id))

    @app.post("/api/reload")
    def post_reload() -> Response:
        try:
            workspace = holder.reload()
        except CatalogError as exc:
            payload = {
                "reloaded": False,
                "issues": [str(issue) for issue in exc.issues] or ["no loader configured"],
            }
            return _json_response(payload, status=409)
        return _json_response({"reloaded": True, "templates": len(workspace.catalog)})

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def create_app_from_paths(paths: DataPaths, ui_dir: str | Path | None = None) -> FastAPI:
    loader = lambda: load_workspace(paths)  # noqa: E731
    return create_app(loader(), loader=loader, ui_dir=ui_dir)
