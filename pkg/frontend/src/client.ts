// Engine connection: one WebSocket, auto-reconnect with capped backoff.
// On reconnect the server replays the run history from the score
// message on, so the reducer rebuilds the view with no special casing
// here.

import { parseServerMessage, pauseMessage, resumeMessage, triggerMessage } from "./protocol.js";
import type { ServerMessage } from "./protocol.js";
import type { Connection } from "./state.js";

export class LiveClient {
  private ws: WebSocket | null = null;
  private retryMs = 1000;
  private closed = false;

  constructor(
    private url: string,
    private onMessage: (msg: ServerMessage) => void,
    private onConnection: (c: Connection) => void,
  ) {}

  connect(): void {
    this.onConnection("connecting");
    const ws = new WebSocket(this.url);
    this.ws = ws;

    ws.onopen = () => {
      this.retryMs = 1000;
      this.onConnection("open");
    };

    ws.onmessage = (ev) => {
      const msg = parseServerMessage(String(ev.data));
      if (msg) this.onMessage(msg);
    };

    ws.onclose = () => {
      if (this.closed) return;
      this.onConnection("lost");
      setTimeout(() => this.connect(), this.retryMs);
      this.retryMs = Math.min(this.retryMs * 2, 10000);
    };

    ws.onerror = () => {
      // onclose follows and owns the retry
    };
  }

  private send(data: string): void {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(data);
    }
  }

  trigger(eventId: string): void {
    this.send(triggerMessage(eventId));
  }

  pause(): void {
    this.send(pauseMessage());
  }

  resume(): void {
    this.send(resumeMessage());
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}

/**
 * One delegated listener turns clicks on rendered cue buttons into
 * trigger sends. Delegation survives innerHTML re-renders, and a
 * single click maps to a single message.
 */
export function wireTriggerClicks(root: Element, send: (eventId: string) => void): void {
  root.addEventListener("click", (ev) => {
    const target = ev.target as Element | null;
    const button = target?.closest("button[data-trigger]");
    if (!button || !root.contains(button)) return;
    const eventId = button.getAttribute("data-trigger");
    if (eventId) send(eventId);
  });
}
