"""HTTP API for the detection service."""

from __future__ import annotations

import collections
import json
import logging
import queue
import secrets
import time

from fastapi import Depends, FastAPI, HTTPException, Request, Response
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from .archive import FlightArchive
from .core import Classifier, DetectionService, ServiceConfig, StateError

TOKEN_TTL_S = 8 * 3600
MALFORMED_ABORT_RATIO = 0.05

log = logging.getLogger("skypatrol.service")


class LoginRequest(BaseModel):
    username: str
    password: str


class StartRequest(BaseModel):
    freeway: str = ""
    date: str = ""


class _LogBuffer(logging.Handler):
    """Keeps recent log lines and feeds live subscribers."""

    def __init__(self, maxlen: int = 500):
        super().__init__()
        self.lines: collections.deque[str] = collections.deque(maxlen=maxlen)
        self.subscribers: list[queue.Queue] = []
        self.setFormatter(logging.Formatter(
            "%(asctime)s %(levelname)s %(name)s: %(message)s"))

    def emit(self, record: logging.LogRecord) -> None:
        line = self.format(record)
        self.lines.append(line)
        for q in list(self.subscribers):
            q.put(line)


def create_app(config: ServiceConfig, classifier: Classifier | None = None,
               archive: FlightArchive | None = None) -> FastAPI:
    if classifier is None:
        classifier = _load_classifier(config)
    if archive is None:
        archive = FlightArchive(config.archive_dir)
    service = DetectionService(config, classifier, archive=archive)

    app = FastAPI(title="patrol incident detection service")
    app.state.service = service
    app.state.archive = archive
    tokens: dict[str, float] = {}
    events: collections.deque[dict] = collections.deque(maxlen=1000)
    log_buffer = _LogBuffer()
    pkg_logger = logging.getLogger("skypatrol")
    pkg_logger.addHandler(log_buffer)
    if pkg_logger.level in (logging.NOTSET, logging.WARNING):
        pkg_logger.setLevel(logging.INFO)

    # mirror publications into the polling ring buffer
    event_q = service.subscribe()

    def _pump_events() -> None:
        while True:
            try:
                events.append(event_q.get_nowait())
            except queue.Empty:
                return

    def require_token(request: Request) -> None:
        header = request.headers.get("authorization", "")
        token = header.removeprefix("Bearer ").strip()
        exp = tokens.get(token)
        if exp is None:
            raise HTTPException(401, "missing or unknown session token")
        if exp < time.time():
            del tokens[token]
            raise HTTPException(401, "session expired; re-authenticate")

    @app.post("/auth/login")
    def login(body: LoginRequest) -> dict:
        if (body.username != config.username
                or body.password != config.password):
            raise HTTPException(401, "invalid credentials")
        token = secrets.token_hex(16)
        tokens[token] = time.time() + TOKEN_TTL_S
        log.info("operator %s logged in", body.username)
        return {"token": token, "expires_in": TOKEN_TTL_S}

    @app.post("/control/start", dependencies=[Depends(require_token)])
    def control_start(body: StartRequest | None = None) -> dict:
        meta = body.model_dump() if body else {}
        try:
            state = service.start(meta)
        except StateError as exc:
            raise HTTPException(409, str(exc))
        log.info("detection started (flight %s)", state["flight_id"])
        return state

    @app.post("/control/pause", dependencies=[Depends(require_token)])
    def control_pause() -> dict:
        try:
            return service.pause()
        except StateError as exc:
            raise HTTPException(409, str(exc))

    @app.post("/control/stop", dependencies=[Depends(require_token)])
    def control_stop() -> dict:
        try:
            state = service.stop()
        except StateError as exc:
            raise HTTPException(409, str(exc))
        log.info("detection stopped; flight archived")
        return state

    @app.post("/feed/ingest", dependencies=[Depends(require_token)])
    async def feed_ingest(request: Request) -> dict:
        body = (await request.body()).decode()
        lines = [ln for ln in body.splitlines() if ln.strip()]
        bad = sum(0 if service.ingest_line(ln) else 1 for ln in lines)
        if lines and bad / len(lines) > MALFORMED_ABORT_RATIO:
            raise HTTPException(
                400, f"{bad}/{len(lines)} malformed feed lines; aborting")
        _pump_events()
        return {"accepted": len(lines) - bad, "malformed": bad}

    @app.get("/live/state")
    def live_state() -> dict:
        return service.state()

    @app.get("/live/results")
    def live_results() -> StreamingResponse:
        q = service.subscribe()

        def stream():
            try:
                while True:
                    try:
                        ev = q.get(timeout=15.0)
                        yield f"data: {json.dumps(ev)}\n\n"
                    except queue.Empty:
                        yield ": keepalive\n\n"
            finally:
                service.unsubscribe(q)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.get("/live/results/poll")
    def live_results_poll(since: int = 0) -> dict:
        _pump_events()
        return {"events": [e for e in events if e["seq"] > since]}

    @app.get("/flights")
    def flights(freeway: str | None = None, date: str | None = None) -> dict:
        return {"flights": archive.query(freeway=freeway, date=date)}

    @app.get("/flights/{flight_id}")
    def flight_detail(flight_id: str) -> dict:
        detail = archive.load(flight_id)
        if detail is None:
            raise HTTPException(404, "unknown flight")
        return detail

    @app.get("/flights/{flight_id}/segments/{segment_id}/preview")
    def segment_preview(flight_id: str, segment_id: str) -> Response:
        path = archive.preview_path(flight_id, segment_id)
        if path is None:
            raise HTTPException(404, "no preview for segment")
        return Response(path.read_bytes(), media_type="image/png")

    @app.get("/logs/recent")
    def logs_recent() -> dict:
        return {"lines": list(log_buffer.lines)}

    @app.get("/logs/stream")
    def logs_stream() -> StreamingResponse:
        q: queue.Queue = queue.Queue()
        log_buffer.subscribers.append(q)

        def stream():
            try:
                for line in list(log_buffer.lines)[-50:]:
                    yield f"data: {json.dumps(line)}\n\n"
                while True:
                    try:
                        line = q.get(timeout=15.0)
                        yield f"data: {json.dumps(line)}\n\n"
                    except queue.Empty:
                        yield ": keepalive\n\n"
            finally:
                log_buffer.subscribers.remove(q)

        return StreamingResponse(stream(), media_type="text/event-stream")

    return app


def _load_classifier(config: ServiceConfig) -> Classifier:
    if config.checkpoint is None:
        raise ValueError("service config needs a model checkpoint path")
    from ..model.metrics import classify_batch
    from ..model.net import load_checkpoint
    model = load_checkpoint(config.checkpoint)

    def classifier(images):
        return classify_batch(model, images)

    return classifier
