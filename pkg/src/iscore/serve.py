"""Live execution server: one port, three client styles.

A connection that opens with an HTTP verb gets either the bundled
static page or, when it asks for an upgrade, a WebSocket carrying the
live protocol. Anything else is treated as raw newline-delimited JSON,
which is what the CLI and the tests speak.

The execution state has one owner: a single engine task consumes a
queue of stimuli (triggers, control commands, timer wakes) and is the
only code that touches the state. Socket handlers just enqueue parsed
messages and drain per-client outboxes, so no lock is ever needed.

Wall time maps to logical time through an anchor pair: logical(t) =
anchor_logical + (wall - anchor_wall) * speed * 1000 / unit_ms. Pause,
resume and speed changes re-anchor; the engine never extrapolates
backwards.
"""

from __future__ import annotations

import asyncio
import base64
import hashlib
import html
import logging
import re
import time
from pathlib import Path
from typing import Optional

from .engine import (
    ExecutionState,
    RejectRecord,
    TriggerPolicy,
    advance,
    fire,
    next_wake,
    resolve_trigger,
    setup_execution,
)
from .errors import AlreadyExecuted, NotEnabled, OutsideWindow, ParseError
from .protocol import MessageStream, dumps, parse_client_message, rejected_message, speed_message
from .score import Score

log = logging.getLogger("iscore.serve")

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"
_HTTP_VERBS = (b"GET ", b"HEAD ", b"POST ", b"OPTIONS ")

_FALLBACK_PAGE = """<!DOCTYPE html>
<html><head><meta charset="utf-8"><title>score</title>
<style>
 body { font-family: monospace; margin: 1.5rem; background: #111; color: #ddd; }
 #log { white-space: pre-wrap; }
 button { margin: 0 .3rem .3rem 0; }
</style></head>
<body>
<h3 id="name"></h3><div id="buttons"></div><div id="log"></div>
<script>
const ws = new WebSocket("ws://" + location.host + "/");
const logEl = document.getElementById("log");
ws.onmessage = (ev) => {
  const m = JSON.parse(ev.data);
  if (m.type === "score") {
    document.getElementById("name").textContent = m.name;
    document.title = m.name;
    const box = document.getElementById("buttons");
    for (const e of m.events.filter((e) => e.interactive)) {
      const b = document.createElement("button");
      b.textContent = e.id;
      b.onclick = () => ws.send(JSON.stringify({type: "trigger", event: e.id}));
      box.appendChild(b);
    }
  }
  logEl.textContent += ev.data + "\\n";
};
</script></body></html>
"""


def _default_ui_dir() -> Optional[Path]:
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return candidate if candidate.is_dir() else None


class LiveServer:
    def __init__(
        self,
        score: Score,
        policy: TriggerPolicy = TriggerPolicy(),
        unit_ms: int = 1000,
        speed: float = 1.0,
        ui_dir: Optional[Path] = None,
    ):
        if unit_ms <= 0:
            raise ValueError("unit_ms must be positive")
        if speed <= 0:
            raise ValueError("speed must be positive")
        state, _ntes, emap = setup_execution(score, policy)
        self.state: ExecutionState = state
        self.emap = emap
        self.unit_ms = unit_ms
        self.speed = speed
        self.paused = False
        self.ui_dir = ui_dir if ui_dir is not None else _default_ui_dir()
        self.score_name = score.name
        self.history: list[str] = []
        self.clients: set[asyncio.Queue] = set()
        self.stream = MessageStream(score, self._broadcast)
        self.commands: asyncio.Queue = asyncio.Queue()
        self.anchor_wall = time.monotonic()
        self.anchor_logical = 0.0
        self._ended = False
        self.bound_port: Optional[int] = None

    # -- engine side -------------------------------------------------

    def _broadcast(self, message: dict) -> None:
        line = dumps(message)
        self.history.append(line)
        for outbox in self.clients:
            outbox.put_nowait(line)

    def logical_now(self) -> float:
        if self.paused:
            return self.anchor_logical
        elapsed = time.monotonic() - self.anchor_wall
        return self.anchor_logical + elapsed * self.speed * 1000.0 / self.unit_ms

    def _wall_deadline(self, logical: int) -> float:
        ahead = (logical - self.anchor_logical) * self.unit_ms / (1000.0 * self.speed)
        return self.anchor_wall + ahead

    def _note_end(self) -> None:
        if self.state.status != "running" and not self._ended:
            self._ended = True
            self.state.log.status = self.state.status
            self.state.log.end_time = self.state.clock
            self.stream("end", None, self.state)

    def _advance_to_now(self) -> None:
        if self.state.status != "running":
            return
        now = max(self.state.clock, int(self.logical_now()))
        advance(self.state, now, observer=self.stream)
        self._note_end()

    def _reanchor(self) -> None:
        self.anchor_logical = self.logical_now()
        self.anchor_wall = time.monotonic()

    def _handle(self, message: dict) -> None:
        kind = message["type"]
        if kind == "trigger":
            self._advance_to_now()
            now = max(self.state.clock, int(self.logical_now()))
            try:
                target = resolve_trigger(self.state, self.emap, message["event"])
            except KeyError:
                rejection = RejectRecord(now, message["event"], "NotEnabled", None, None)
                self.state.log.rejected.append(rejection)
                self.stream("rejected", rejection, self.state)
                return
            try:
                record = fire(self.state, target, now, cause="trigger")
                self.stream("fired", record, self.state)
            except OutsideWindow as exc:
                rejection = RejectRecord(now, target, "OutsideWindow", exc.lb, exc.ub)
                self.state.log.rejected.append(rejection)
                self.stream("rejected", rejection, self.state)
            except (NotEnabled, AlreadyExecuted):
                window = self.state.windows.get(target)
                if window is not None:
                    lb, ub = window
                else:
                    lb = ub = self.state.executed.get(target)
                rejection = RejectRecord(now, target, "NotEnabled", lb, ub)
                self.state.log.rejected.append(rejection)
                self.stream("rejected", rejection, self.state)
            self._note_end()
        elif kind == "pause":
            if not self.paused:
                self._advance_to_now()
                self._reanchor()
                self.paused = True
                self._broadcast(speed_message(0.0, self.state.clock))
        elif kind == "resume":
            if self.paused:
                self.anchor_wall = time.monotonic()
                self.paused = False
                self._broadcast(speed_message(self.speed, self.state.clock))
        elif kind == "speed":
            self._advance_to_now()
            self._reanchor()
            self.speed = float(message["factor"])
            if not self.paused:
                self._broadcast(speed_message(self.speed, self.state.clock))

    async def engine_loop(self) -> None:
        self.anchor_wall = time.monotonic()
        self.stream("init", None, self.state)
        self._broadcast(speed_message(0.0 if self.paused else self.speed, 0))
        self._note_end()
        while True:
            timeout = None
            if self.state.status == "running" and not self.paused:
                wake = next_wake(self.state)
                if wake is not None:
                    timeout = max(0.0, self._wall_deadline(wake) - time.monotonic())
            try:
                if timeout is None:
                    message = await self.commands.get()
                else:
                    message = await asyncio.wait_for(self.commands.get(), timeout)
            except asyncio.TimeoutError:
                self._advance_to_now()
                continue
            self._advance_to_now()
            self._handle(message)

    # -- socket side -------------------------------------------------

    def _register(self) -> asyncio.Queue:
        outbox: asyncio.Queue = asyncio.Queue()
        for line in self.history:
            outbox.put_nowait(line)
        self.clients.add(outbox)
        return outbox

    def _page(self) -> bytes:
        text = _FALLBACK_PAGE
        if self.ui_dir is not None:
            index = self.ui_dir / "index.html"
            if index.is_file():
                text = index.read_text(encoding="utf-8")
        title = f"<title>{html.escape(self.score_name)}</title>"
        text = re.sub(r"<title>.*?</title>", title, text, count=1, flags=re.S)
        return text.encode("utf-8")

    def _asset(self, path: str) -> Optional[tuple[bytes, str]]:
        if path in ("/", "/index.html"):
            return self._page(), "text/html; charset=utf-8"
        if self.ui_dir is None or "/" in path.strip("/"):
            return None
        target = self.ui_dir / path.lstrip("/")
        if not target.is_file():
            return None
        kind = {
            ".js": "application/javascript",
            ".css": "text/css",
            ".map": "application/json",
        }.get(target.suffix, "application/octet-stream")
        return target.read_bytes(), kind

    async def _serve_http(self, reader, writer, request_line: str) -> None:
        headers: dict[str, str] = {}
        while True:
            raw = await reader.readline()
            line = raw.decode("latin-1").strip()
            if not line:
                break
            if ":" in line:
                key, value = line.split(":", 1)
                headers[key.strip().lower()] = value.strip()
        parts = request_line.split()
        path = parts[1] if len(parts) > 1 else "/"
        if headers.get("upgrade", "").lower() == "websocket":
            await self._serve_websocket(reader, writer, headers)
            return
        found = self._asset(path)
        if found is None:
            body = b"not found\n"
            head = f"HTTP/1.1 404 Not Found\r\nContent-Length: {len(body)}\r\nConnection: close\r\n\r\n"
        else:
            body, kind = found
            head = (
                "HTTP/1.1 200 OK\r\n"
                f"Content-Type: {kind}\r\nContent-Length: {len(body)}\r\nConnection: close\r\n\r\n"
            )
        writer.write(head.encode("latin-1") + body)
        await writer.drain()
        writer.close()

    async def _serve_websocket(self, reader, writer, headers: dict) -> None:
        key = headers.get("sec-websocket-key")
        if key is None:
            writer.write(b"HTTP/1.1 400 Bad Request\r\nConnection: close\r\n\r\n")
            await writer.drain()
            writer.close()
            return
        accept = base64.b64encode(
            hashlib.sha1((key + _WS_GUID).encode("latin-1")).digest()
        ).decode("latin-1")
        writer.write(
            (
                "HTTP/1.1 101 Switching Protocols\r\n"
                "Upgrade: websocket\r\nConnection: Upgrade\r\n"
                f"Sec-WebSocket-Accept: {accept}\r\n\r\n"
            ).encode("latin-1")
        )
        await writer.drain()
        outbox = self._register()
        sender = asyncio.ensure_future(self._ws_sender(writer, outbox))
        try:
            while True:
                opcode, payload = await _ws_read_message(reader)
                if opcode == 8:
                    writer.write(_ws_frame(payload[:2], opcode=8))
                    await writer.drain()
                    break
                if opcode == 9:
                    writer.write(_ws_frame(payload, opcode=10))
                    await writer.drain()
                elif opcode == 1:
                    self._submit_line(payload.decode("utf-8"), outbox)
        except (asyncio.IncompleteReadError, ConnectionError):
            pass
        finally:
            self.clients.discard(outbox)
            sender.cancel()
            writer.close()

    async def _ws_sender(self, writer, outbox: asyncio.Queue) -> None:
        try:
            while True:
                line = await outbox.get()
                writer.write(_ws_frame(line.encode("utf-8")))
                await writer.drain()
        except (ConnectionError, asyncio.CancelledError):
            pass

    def _submit_line(self, line: str, outbox: asyncio.Queue) -> None:
        if not line.strip():
            return
        try:
            message = parse_client_message(line)
        except ParseError as exc:
            outbox.put_nowait(dumps({"type": "error", "error": exc.payload()}))
            return
        self.commands.put_nowait(message)

    async def _serve_ndjson(self, reader, writer, first_line: bytes) -> None:
        outbox = self._register()
        sender = asyncio.ensure_future(self._ndjson_sender(writer, outbox))
        try:
            line = first_line
            while line:
                self._submit_line(line.decode("utf-8", errors="replace"), outbox)
                line = await reader.readline()
        except ConnectionError:
            pass
        finally:
            self.clients.discard(outbox)
            sender.cancel()
            writer.close()

    async def _ndjson_sender(self, writer, outbox: asyncio.Queue) -> None:
        try:
            while True:
                line = await outbox.get()
                writer.write(line.encode("utf-8") + b"\n")
                await writer.drain()
        except (ConnectionError, asyncio.CancelledError):
            pass

    async def _on_connect(self, reader, writer) -> None:
        try:
            first = await reader.readline()
        except ConnectionError:
            writer.close()
            return
        if not first:
            writer.close()
            return
        try:
            if first.startswith(_HTTP_VERBS):
                await self._serve_http(reader, writer, first.decode("latin-1").strip())
            else:
                await self._serve_ndjson(reader, writer, first.rstrip(b"\r\n"))
        except (ConnectionError, asyncio.IncompleteReadError):
            writer.close()

    async def run(self, host: str = "127.0.0.1", port: int = 8760) -> None:
        engine = asyncio.ensure_future(self.engine_loop())
        server = await asyncio.start_server(self._on_connect, host, port)
        addr = server.sockets[0].getsockname()
        self.bound_port = addr[1]
        log.info("serving %r on %s:%s", self.score_name, addr[0], addr[1])
        try:
            async with server:
                await server.serve_forever()
        finally:
            engine.cancel()


def _ws_frame(payload: bytes, opcode: int = 1) -> bytes:
    head = bytes([0x80 | opcode])
    n = len(payload)
    if n < 126:
        head += bytes([n])
    elif n < 1 << 16:
        head += bytes([126]) + n.to_bytes(2, "big")
    else:
        head += bytes([127]) + n.to_bytes(8, "big")
    return head + payload


async def _ws_read_message(reader) -> tuple[int, bytes]:
    """One complete message (fragments joined). Control frames pass through."""
    opcode = None
    buffer = b""
    while True:
        first = await reader.readexactly(2)
        fin = first[0] & 0x80
        op = first[0] & 0x0F
        masked = first[1] & 0x80
        length = first[1] & 0x7F
        if length == 126:
            length = int.from_bytes(await reader.readexactly(2), "big")
        elif length == 127:
            length = int.from_bytes(await reader.readexactly(8), "big")
        mask = await reader.readexactly(4) if masked else None
        payload = await reader.readexactly(length) if length else b""
        if mask:
            payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        if op in (8, 9, 10):
            return op, payload
        if opcode is None:
            opcode = op
        buffer += payload
        if fin:
            return opcode if opcode is not None else 1, buffer


def serve_score(
    score: Score,
    policy: TriggerPolicy = TriggerPolicy(),
    port: int = 8760,
    host: str = "127.0.0.1",
    unit_ms: int = 1000,
    speed: float = 1.0,
    ui_dir: Optional[Path] = None,
) -> None:
    """Blocking entry point; returns when interrupted."""
    server = LiveServer(score, policy, unit_ms=unit_ms, speed=speed, ui_dir=ui_dir)
    try:
        asyncio.run(server.run(host=host, port=port))
    except KeyboardInterrupt:
        pass
