"""Minimal reference server implementing the backend wire protocol.

Used by the engine's contract and HTTP-client tests; intentionally
stdlib-only so the engine never depends on a web framework.
"""
from __future__ import annotations

import hashlib
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

EMBED_DIM = 16


def _seed_floats(key: str, n: int):
    out = []
    counter = 0
    while len(out) < n:
        digest = hashlib.sha256(f"{key}:{counter}".encode()).digest()
        for i in range(0, 32, 4):
            out.append(int.from_bytes(digest[i : i + 4], "little") / 2**32 - 0.5)
        counter += 1
    return out[:n]


class _Handler(BaseHTTPRequestHandler):
    def log_message(self, *args):
        pass

    def _reply(self, status: int, payload: dict):
        raw = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(raw)))
        self.end_headers()
        self.wfile.write(raw)

    def _error(self, status: int, message: str, retryable: bool):
        self._reply(status, {"error": {"retryable": retryable, "message": message}})

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        try:
            body = json.loads(self.rfile.read(length))
        except (ValueError, UnicodeDecodeError):
            return self._error(400, "invalid JSON body", False)

        if self.path == "/v1/complete":
            prompt = body.get("prompt")
            if not isinstance(prompt, str) or not prompt:
                return self._error(400, "prompt required", False)
            max_tokens = int(body.get("max_tokens", 512))
            words = [
                f"w{hashlib.sha256((prompt + str(i)).encode()).hexdigest()[:4]}"
                for i in range(min(8, max_tokens))
            ]
            return self._reply(200, {"text": " ".join(words)})

        if self.path == "/v1/embed":
            text = body.get("input")
            modality = body.get("modality")
            if not isinstance(text, str) or modality not in ("text", "image", "video"):
                return self._error(400, "input and modality required", False)
            values = _seed_floats(f"{modality}:{text}", EMBED_DIM)
            norm = sum(v * v for v in values) ** 0.5
            values = [v / norm for v in values]
            return self._reply(
                200, {"embedding": values, "dim": EMBED_DIM, "normalized": True}
            )

        if self.path == "/v1/caption":
            uri = body.get("uri")
            if not isinstance(uri, str) or not uri:
                return self._error(400, "uri required", False)
            tag = body.get("model", "stub")
            return self._reply(
                200,
                {"text": f"stub caption of {uri} by {tag}"},
            )

        return self._error(404, f"unknown path {self.path}", False)


class StubServer:
    def __init__(self):
        self.server = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    @property
    def base_url(self) -> str:
        host, port = self.server.server_address
        return f"http://{host}:{port}"

    def __enter__(self):
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.server.shutdown()
        self.server.server_close()
