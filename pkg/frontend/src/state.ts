// View state and its reducer. The whole client view is a fold over the
// message stream: no timers, no derived temporal math, so replaying a
// recorded stream rebuilds the identical view. The only thing the
// client ever computes on its own is the playhead position, moving
// linearly at the engine's announced speed factor.

import type {
  EventEntry,
  FiredMessage,
  ScoreObject,
  ServerMessage,
} from "./protocol.js";

export type Connection = "connecting" | "open" | "lost";

export type Badge = "pending" | "enabled" | "fired" | "cancelled";

export type EventView = {
  entry: EventEntry;
  window: { lb: number; ub: number | null } | null;
  enabled: boolean;
  firedAt: number | null;
  firedCause: string | null;
};

export type Toast = {
  event: string;
  reason: string;
  lb: number | null;
  ub: number | null;
};

export type TraceRow = {
  event: string;
  time: number;
  actions: string[];
  cause: string;
};

export type ViewState = {
  connection: Connection;
  name: string | null;
  objects: ScoreObject[];
  events: Record<string, EventView>;
  order: string[];
  status: "running" | "finished" | "cancelled";
  clock: number;
  // Announced playhead rate; 0 until the engine says otherwise, 0 while
  // paused. Recorded simulation streams never announce one.
  speed: number;
  speedAnnounced: boolean;
  anchorTime: number;
  anchorWall: number;
  toasts: Toast[];
  trace: TraceRow[];
  log: string[];
  dropped: number;
};

export function initialState(): ViewState {
  return {
    connection: "connecting",
    name: null,
    objects: [],
    events: {},
    order: [],
    status: "running",
    clock: 0,
    speed: 0,
    speedAnnounced: false,
    anchorTime: 0,
    anchorWall: 0,
    toasts: [],
    trace: [],
    log: [],
    dropped: 0,
  };
}

export function withConnection(state: ViewState, connection: Connection): ViewState {
  if (state.connection === connection) return state;
  return { ...state, connection };
}

export function fmtWindow(lb: number | null, ub: number | null): string {
  const lo = lb === null ? "?" : String(lb);
  return ub === null ? `[${lo},inf)` : `[${lo},${ub}]`;
}

function describe(msg: ServerMessage): string {
  switch (msg.type) {
    case "score":
      return `score "${msg.name}": ${msg.objects.length} objects, ${msg.events.length} events`;
    case "window":
      return `window ${msg.event} ${fmtWindow(msg.lb, msg.ub)} ${msg.enabled ? "enabled" : "waiting"}`;
    case "fired": {
      const actions = msg.actions.length ? ` -> ${msg.actions.join(", ")}` : "";
      return `fired ${msg.event} at ${msg.time} (${msg.cause})${actions}`;
    }
    case "rejected":
      return `rejected ${msg.event}: ${msg.reason}, window ${fmtWindow(msg.lb, msg.ub)}`;
    case "status":
      return `status ${msg.value} at ${msg.time}`;
    case "speed":
      return msg.factor === 0 ? `paused at ${msg.time}` : `speed x${msg.factor} at ${msg.time}`;
    case "error":
      return `engine error: ${JSON.stringify(msg.error)}`;
  }
}

function timeOf(msg: ServerMessage): number | null {
  return msg.type === "fired" || msg.type === "status" || msg.type === "speed"
    ? msg.time
    : null;
}

function bareEvent(id: string): EventView {
  return {
    entry: { id, labels: [], actions: [], interactive: false },
    window: null,
    enabled: false,
    firedAt: null,
    firedCause: null,
  };
}

function applyFired(state: ViewState, msg: FiredMessage): ViewState {
  const prev = state.events[msg.event] ?? bareEvent(msg.event);
  const events = {
    ...state.events,
    [msg.event]: {
      ...prev,
      window: null,
      enabled: false,
      firedAt: msg.time,
      firedCause: msg.cause,
    },
  };
  const order = msg.event in state.events ? state.order : [...state.order, msg.event];
  const trace = [
    ...state.trace,
    { event: msg.event, time: msg.time, actions: msg.actions, cause: msg.cause },
  ];
  return { ...state, events, order, trace };
}

/**
 * Fold one engine message into the view. Pure: same state and message
 * in, same state out. `wallNow` only re-anchors the playhead; replayed
 * streams leave it at 0 so replays are reproducible.
 *
 * A fresh "score" message resets the run view (the server replays full
 * history on reconnect, starting from the score). Messages whose time
 * field is behind the clock are stale and are dropped unseen.
 */
export function reduce(state: ViewState, msg: ServerMessage, wallNow = 0): ViewState {
  const when = timeOf(msg);
  if (when !== null && when < state.clock) {
    return { ...state, dropped: state.dropped + 1 };
  }

  let next: ViewState;
  switch (msg.type) {
    case "score": {
      next = {
        ...initialState(),
        connection: state.connection,
        dropped: state.dropped,
        name: msg.name,
        objects: msg.objects,
        events: Object.fromEntries(
          msg.events.map((e) => [e.id, { ...bareEvent(e.id), entry: e }]),
        ),
        order: msg.events.map((e) => e.id),
      };
      break;
    }
    case "window": {
      const prev = state.events[msg.event] ?? bareEvent(msg.event);
      const events = {
        ...state.events,
        [msg.event]: { ...prev, window: { lb: msg.lb, ub: msg.ub }, enabled: msg.enabled },
      };
      const order = msg.event in state.events ? state.order : [...state.order, msg.event];
      next = { ...state, events, order };
      break;
    }
    case "fired":
      next = applyFired(state, msg);
      break;
    case "rejected":
      next = {
        ...state,
        toasts: [...state.toasts, { event: msg.event, reason: msg.reason, lb: msg.lb, ub: msg.ub }],
      };
      break;
    case "status":
      next = { ...state, status: msg.value };
      break;
    case "speed":
      next = { ...state, speed: msg.factor, speedAnnounced: true };
      break;
    case "error":
      next = state;
      break;
  }

  if (when !== null) {
    next = { ...next, clock: Math.max(next.clock, when), anchorTime: when, anchorWall: wallNow };
  }
  return { ...next, log: [...next.log, describe(msg)] };
}

/**
 * Where the playhead sits at wall time `wallNow` (ms): the last
 * anchored score time plus linear motion at the announced factor.
 * A terminal status pins it to the final clock.
 */
export function playheadAt(state: ViewState, wallNow: number): number {
  if (state.status !== "running") return state.clock;
  const elapsed = Math.max(0, wallNow - state.anchorWall) / 1000;
  return state.anchorTime + elapsed * state.speed;
}

/** Badge for one event under the current run status. */
export function badgeOf(state: ViewState, ev: EventView): Badge {
  if (ev.firedAt !== null) return "fired";
  if (state.status !== "running") return "cancelled";
  if (ev.enabled) return "enabled";
  return "pending";
}
