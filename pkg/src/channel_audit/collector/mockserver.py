"""Bundled mock endpoint for collector tests and demos.

A threaded HTTP server that serves fixture channel JSON at
``/api/channels/{id}``, posts at ``/api/channels/{id}/posts``, page HTML
at ``/channel/{id}``, and a machine-readable request log at ``/_log``.
Each log entry records the request path, a monotonic receive timestamp,
and how many requests were in flight at that moment — which is exactly
what the politeness checks need.
"""

from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional

__all__ = ["MockChannelServer"]


class MockChannelServer:
    """Context-managed fixture server bound to an ephemeral localhost port."""

    def __init__(
        self,
        channels: dict[str, dict],
        pages: Optional[dict[str, str]] = None,
        posts: Optional[dict[str, list]] = None,
        latency: float = 0.0,
    ):
        self.channels = channels
        self.pages = pages or {}
        self.posts = posts or {}
        self.latency = latency
        self._log: list[dict] = []
        self._log_lock = threading.Lock()
        self._in_flight = 0
        self._server: Optional[ThreadingHTTPServer] = None
        self._thread: Optional[threading.Thread] = None

    # -- lifecycle -----------------------------------------------------------

    def start(self) -> "MockChannelServer":
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # silence stderr chatter
                pass

            def do_GET(self):
                outer._handle(self)

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._thread.join(timeout=5)
            self._server = None

    def __enter__(self) -> "MockChannelServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    # -- request handling ----------------------------------------------------

    def _record(self, path: str) -> None:
        with self._log_lock:
            self._in_flight += 1
            self._log.append(
                {
                    "path": path,
                    "time": time.monotonic(),
                    "concurrent": self._in_flight,
                }
            )

    def _done(self) -> None:
        with self._log_lock:
            self._in_flight -= 1

    def _handle(self, handler: BaseHTTPRequestHandler) -> None:
        path = handler.path
        if path == "/_log":
            with self._log_lock:
                body = json.dumps(self._log).encode()
            self._respond(handler, 200, body, "application/json")
            return
        self._record(path)
        try:
            if self.latency > 0:
                time.sleep(self.latency)
            if path.startswith("/api/channels/"):
                rest = path[len("/api/channels/") :]
                if rest.endswith("/posts"):
                    channel_id = rest[: -len("/posts")]
                    payload = self.posts.get(channel_id)
                    # madeForKids channels have no community tab: 404
                    if payload is None:
                        self._respond(handler, 404, b"{}", "application/json")
                    else:
                        self._respond(
                            handler, 200, json.dumps(payload).encode(), "application/json"
                        )
                else:
                    payload = self.channels.get(rest)
                    if payload is None:
                        self._respond(handler, 404, b"{}", "application/json")
                    else:
                        self._respond(
                            handler, 200, json.dumps(payload).encode(), "application/json"
                        )
            elif path.startswith("/channel/"):
                channel_id = path[len("/channel/") :]
                body = self.pages.get(channel_id, "<html><body>404 Not Found</body></html>")
                self._respond(handler, 200, body.encode(), "text/html")
            else:
                self._respond(handler, 404, b"not found", "text/plain")
        finally:
            self._done()

    @staticmethod
    def _respond(handler, code: int, body: bytes, content_type: str) -> None:
        handler.send_response(code)
        handler.send_header("Content-Type", content_type)
        handler.send_header("Content-Length", str(len(body)))
        handler.end_headers()
        handler.wfile.write(body)

    # -- log access ------------------------------------------------------------

    def request_log(self) -> list[dict]:
        """Snapshot of the request log (excluding /_log requests)."""
        with self._log_lock:
            return list(self._log)
