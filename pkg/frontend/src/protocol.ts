// Wire types for the engine's live protocol: one JSON object per
// WebSocket text frame (or per NDJSON line in recorded streams). The
// shapes mirror the engine's serializer field for field.

export type Interval = [number, number | null];

export type ScoreObject = {
  id: string;
  duration: Interval[];
  parent?: string;
  startAction?: string;
  endAction?: string;
};

export type RelationEndpoint = { object: string; point: "start" | "end" };

export type ScoreRelation = {
  from: RelationEndpoint;
  to: RelationEndpoint;
  delta: Interval[];
};

// labels entries are [kind, object id] pairs; kind is one of
// "startPoint", "endPoint", "interactiveObject".
export type EventEntry = {
  id: string;
  labels: [string, string][];
  actions: string[];
  interactive: boolean;
};

export type ScoreMessage = {
  type: "score";
  name: string;
  objects: ScoreObject[];
  relations: ScoreRelation[];
  events: EventEntry[];
};

export type WindowMessage = {
  type: "window";
  event: string;
  lb: number;
  ub: number | null;
  enabled: boolean;
};

export type FiredMessage = {
  type: "fired";
  event: string;
  time: number;
  actions: string[];
  cause: "eager" | "trigger" | "autoFire";
};

export type RejectedMessage = {
  type: "rejected";
  event: string;
  reason: string;
  lb: number | null;
  ub: number | null;
};

export type StatusMessage = {
  type: "status";
  value: "running" | "finished" | "cancelled";
  time: number;
};

// factor 0.0 means the run is paused.
export type SpeedMessage = { type: "speed"; factor: number; time: number };

export type ServerMessage =
  | ScoreMessage
  | WindowMessage
  | FiredMessage
  | RejectedMessage
  | StatusMessage
  | SpeedMessage
  | ErrorMessage;

// The engine answers a malformed client line with this.
export type ErrorMessage = { type: "error"; error: unknown };

const SERVER_TYPES = new Set(["score", "window", "fired", "rejected", "status", "speed", "error"]);

/**
 * Parse one line or frame from the engine. Returns null for blanks and
 * for anything that is not a known message shape; mid-performance a
 * surprising message should be skipped, never crash the view.
 */
export function parseServerMessage(raw: string): ServerMessage | null {
  const line = raw.trim();
  if (!line) return null;
  let value: unknown;
  try {
    value = JSON.parse(line);
  } catch {
    return null;
  }
  if (typeof value !== "object" || value === null) return null;
  const type = (value as { type?: unknown }).type;
  if (typeof type !== "string" || !SERVER_TYPES.has(type)) return null;
  return value as ServerMessage;
}

/** The one message a performer's click produces. */
export function triggerMessage(eventId: string): string {
  return JSON.stringify({ type: "trigger", event: eventId });
}

export function pauseMessage(): string {
  return JSON.stringify({ type: "pause" });
}

export function resumeMessage(): string {
  return JSON.stringify({ type: "resume" });
}
