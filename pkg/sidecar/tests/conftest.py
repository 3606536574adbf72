"""Shared fixtures: in-process clients, a stub completion endpoint, and a
live uvicorn server for wire-level tests."""

from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest
import uvicorn
from fastapi.testclient import TestClient

from scorer_sidecar.app import create_app
from scorer_sidecar.config import Settings


def make_client(**overrides) -> TestClient:
    return TestClient(create_app(Settings(**overrides)))


@pytest.fixture
def client() -> TestClient:
    return make_client()


# ---------------------------------------------------------------------------
# Stub upstream completion endpoint
# ---------------------------------------------------------------------------


class StubUpstream:
    """Tiny HTTP server; responder(payload) decides (status, body)."""

    def __init__(self, responder):
        self.responder = responder
        self.requests: list[dict] = []
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                payload = json.loads(self.rfile.read(length) or b"{}")
                outer.requests.append(
                    {"path": self.path, "payload": payload, "headers": dict(self.headers)}
                )
                status, body = outer.responder(payload)
                data = json.dumps(body).encode() if isinstance(body, dict) else str(body).encode()
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def log_message(self, *args):
                pass

        self.server = HTTPServer(("127.0.0.1", 0), Handler)
        self.url = f"http://127.0.0.1:{self.server.server_port}/complete"
        self.thread = threading.Thread(
            target=lambda: self.server.serve_forever(poll_interval=0.02), daemon=True
        )
        self.thread.start()

    def close(self):
        self.server.shutdown()
        self.server.server_close()


@pytest.fixture
def upstream():
    stubs: list[StubUpstream] = []

    def factory(responder) -> StubUpstream:
        stub = StubUpstream(responder)
        stubs.append(stub)
        return stub

    yield factory
    for stub in stubs:
        stub.close()


@pytest.fixture
def prompt_dir(tmp_path):
    directory = tmp_path / "prompts"
    directory.mkdir()
    (directory / "default.txt").write_text("State the decision and the rationale.\n", encoding="utf-8")
    return directory


# ---------------------------------------------------------------------------
# Live server
# ---------------------------------------------------------------------------


class LiveSidecar:
    """The app served by uvicorn on an ephemeral port in a daemon thread."""

    def __init__(self, asgi_app):
        config = uvicorn.Config(asgi_app, host="127.0.0.1", port=0, log_level="warning")
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)
        self.thread.start()
        deadline = time.monotonic() + 10.0
        while not self.server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("sidecar server did not start within 10 s")
            time.sleep(0.01)
        port = self.server.servers[0].sockets[0].getsockname()[1]
        self.url = f"http://127.0.0.1:{port}"

    def close(self):
        self.server.should_exit = True
        self.thread.join(timeout=5)


class CountingASGI:
    """Wrapper counting POST /score requests; used to prove resume skip."""

    def __init__(self, asgi_app):
        self.asgi_app = asgi_app
        self.score_posts = 0

    async def __call__(self, scope, receive, send):
        if scope["type"] == "http" and scope.get("path") == "/score" and scope.get("method") == "POST":
            self.score_posts += 1
        await self.asgi_app(scope, receive, send)


@pytest.fixture
def live_sidecar():
    counter = CountingASGI(create_app(Settings()))
    server = LiveSidecar(counter)
    server.counter = counter
    yield server
    server.close()
