"""Local HTTP/JSON service exposing pipeline sessions to scripts and the
trainer UI.

Endpoints::

    GET  /healthz
    POST /sessions                     -> 201 {"session_id": ...}
    POST /sessions/{id}/frames         (netpbm bytes or {"frame_b64": ...})
    POST /sessions/{id}/label          {"label": "Smile" | null}
    POST /sessions/{id}/train
    GET  /sessions/{id}/model
    POST /sessions/{id}/reset-reference

Requests within one session are serialized; sessions are independent.
"""

from __future__ import annotations

import base64
import binascii
import json
import logging
import threading
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

from ..errors import DegenerateTrainingError, VisageError
from ..imgcore import decode_netpbm
from ..pipeline import ConfusionMatrix, SessionConfig
from ..pipeline.session import Session
from ..svm import (SvmParams, cross_validate_predictions, dumps_model_text,
                   grid_search, scale_apply, scale_fit, train_multiclass)

log = logging.getLogger("visage.service")


class SessionStore:
    def __init__(self, config: SessionConfig):
        self.config = config
        self._sessions = {}
        self._store_lock = threading.Lock()

    def create(self) -> str:
        session_id = uuid.uuid4().hex[:12]
        with self._store_lock:
            self._sessions[session_id] = (Session(self.config), threading.Lock())
        return session_id

    def get(self, session_id: str):
        with self._store_lock:
            return self._sessions.get(session_id)


def frame_result_json(result) -> dict:
    landmarks = None
    if result.landmarks is not None:
        landmarks = [
            {"x": float(result.landmarks.xy[i, 0]),
             "y": float(result.landmarks.xy[i, 1]),
             "region": result.landmarks.regions[i],
             "valid": bool(result.landmarks.valid[i])}
            for i in range(21)
        ]
    return {
        "frame": result.index,
        "source": result.source,
        "box": list(result.box) if result.box else None,
        "skin_checked": result.skin_checked,
        "skin_fraction": result.skin_fraction,
        "landmarks": landmarks,
        "window_complete": result.feature is not None,
        "predicted": result.predicted,
        "timings_us": result.timings_us,
    }


def train_session_pool(session: Session):
    """Grid-search and train on the session's labeled pool.

    Returns (model, report dict with a held-out confusion matrix).
    """
    if not session.pool:
        raise DegenerateTrainingError("no labeled feature vectors captured")
    y = np.array([label_id for label_id, _ in session.pool], dtype=np.int64)
    X = np.array([values for _, values in session.pool])
    if np.unique(y).size < 2:
        raise DegenerateTrainingError("training needs at least two labeled classes")

    grid = session.config.svm
    scaling = scale_fit(X)
    Xs = scale_apply(scaling, X)
    folds = min(grid.folds, len(y))
    result = grid_search(Xs, y, grid.c_grid, grid.gamma_grid,
                         k=folds, seed=grid.seed, tolerance=grid.tolerance)
    params = SvmParams(c=result.c, gamma=result.gamma, tolerance=grid.tolerance)

    labels = session.config.labels
    y_pred = cross_validate_predictions(Xs, y, params, k=folds, seed=grid.seed)
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for t, p in zip(y, y_pred):
        counts[t, p] += 1
    confusion = ConfusionMatrix(labels, counts)

    model = train_multiclass(X, y, params, scaling)
    report = {
        "best_c": result.c,
        "best_gamma": result.gamma,
        "cv_accuracy": result.accuracy,
        "pool_counts": session.pool_counts(),
        "confusion": confusion.to_dict(),
    }
    return model, report


class Handler(BaseHTTPRequestHandler):
    store: SessionStore = None  # set by serve()

    def log_message(self, fmt, *args):
        log.debug("%s " + fmt, self.address_string(), *args)

    def _send(self, code: int, payload, content_type="application/json"):
        body = payload if isinstance(payload, bytes) else \
            json.dumps(payload, sort_keys=True).encode()
        self.send_response(code)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _error(self, code: int, message: str):
        self._send(code, {"error": message})

    def _body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length)

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def do_GET(self):
        parts = [p for p in self.path.split("/") if p]
        if parts == ["healthz"]:
            self._send(200, {"status": "ok"})
            return
        if len(parts) == 3 and parts[0] == "sessions" and parts[2] == "model":
            entry = self.store.get(parts[1])
            if entry is None:
                self._error(404, "unknown session")
                return
            session, lock = entry
            with lock:
                if session.model is None:
                    self._error(404, "no trained model in this session")
                    return
                text = dumps_model_text(session.model)
            self._send(200, text.encode(), content_type="text/plain")
            return
        self._error(404, "no such endpoint")

    def do_POST(self):
        parts = [p for p in self.path.split("/") if p]
        if parts == ["sessions"]:
            session_id = self.store.create()
            self._send(201, {"session_id": session_id})
            return
        if len(parts) == 3 and parts[0] == "sessions":
            entry = self.store.get(parts[1])
            if entry is None:
                self._error(404, "unknown session")
                return
            session, lock = entry
            handler = {"frames": self._post_frame,
                       "label": self._post_label,
                       "train": self._post_train,
                       "reset-reference": self._post_reset}.get(parts[2])
            if handler is None:
                self._error(404, "no such endpoint")
                return
            with lock:
                handler(session)
            return
        self._error(404, "no such endpoint")

    def _post_frame(self, session: Session):
        raw = self._body()
        content_type = (self.headers.get("Content-Type") or "").split(";")[0].strip()
        try:
            if content_type == "application/json":
                payload = json.loads(raw.decode())
                frame_bytes = base64.b64decode(payload["frame_b64"])
            else:
                frame_bytes = raw
            frame = decode_netpbm(frame_bytes)
        except (VisageError, KeyError, ValueError, binascii.Error,
                json.JSONDecodeError) as exc:
            self._error(400, f"malformed frame: {exc}")
            return
        try:
            result = session.process_frame(frame)
        except VisageError as exc:
            self._error(400, str(exc))
            return
        self._send(200, frame_result_json(result))

    def _post_label(self, session: Session):
        try:
            payload = json.loads(self._body().decode() or "{}")
            session.set_label(payload.get("label"))
        except (VisageError, json.JSONDecodeError) as exc:
            self._error(400, str(exc))
            return
        self._send(200, {"label": session.active_label,
                         "pool_counts": session.pool_counts()})

    def _post_train(self, session: Session):
        try:
            model, report = train_session_pool(session)
        except DegenerateTrainingError as exc:
            self._error(409, str(exc))
            return
        session.model = model
        self._send(200, report)

    def _post_reset(self, session: Session):
        session.reset_reference()
        self._send(200, {"reset": True})


def serve(config: SessionConfig, port: int, host: str = "127.0.0.1"):
    """Blocking server loop; returns the server object when run in a thread."""
    handler = type("BoundHandler", (Handler,), {"store": SessionStore(config)})
    server = ThreadingHTTPServer((host, port), handler)
    log.info("listening on %s:%d", host, port)
    return server
