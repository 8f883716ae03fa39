// HTML-string view of a ViewState. Pure: same state and playhead in,
// same markup out, which is what makes the replay snapshots meaningful.
// Geometry is percentage-based over a horizon derived from the state,
// so the timeline needs no measurement pass.

import type { ScoreObject } from "./protocol.js";
import { Badge, EventView, ViewState, badgeOf, fmtWindow } from "./state.js";

export const NAME_COL = "12rem";
const LOG_LINES = 200;
const TOASTS_SHOWN = 3;

function esc(s: string): string {
  return s.replace(/[&<>"']/g, (c) => {
    switch (c) {
      case "&": return "&amp;";
      case "<": return "&lt;";
      case ">": return "&gt;";
      case '"': return "&quot;";
      default: return "&#39;";
    }
  });
}

function pct(t: number, horizon: number): string {
  return ((t / horizon) * 100).toFixed(2) + "%";
}

/** Rightmost score time the view knows about, padded by one unit. */
export function horizonOf(state: ViewState, playhead: number): number {
  let h = Math.max(1, playhead, state.clock);
  for (const id of state.order) {
    const ev = state.events[id];
    if (ev.firedAt !== null) h = Math.max(h, ev.firedAt);
    if (ev.window) h = Math.max(h, ev.window.lb, ev.window.ub ?? 0);
  }
  return h + 1;
}

function fmtDuration(obj: ScoreObject): string {
  return obj.duration.map(([lo, hi]) => fmtWindow(lo, hi)).join("u");
}

type LaneEvent = { kind: string; ev: EventView };

const KIND_ORDER: Record<string, number> = { startPoint: 0, interactiveObject: 1, endPoint: 2 };
const KIND_NAME: Record<string, string> = { startPoint: "start", interactiveObject: "cue", endPoint: "end" };

function laneEvents(state: ViewState, objectId: string): LaneEvent[] {
  const found: LaneEvent[] = [];
  for (const id of state.order) {
    const ev = state.events[id];
    for (const [kind, owner] of ev.entry.labels) {
      if (owner === objectId) found.push({ kind, ev });
    }
  }
  return found.sort((a, b) => (KIND_ORDER[a.kind] ?? 9) - (KIND_ORDER[b.kind] ?? 9));
}

function badgeChip(state: ViewState, le: LaneEvent): string {
  const badge: Badge = badgeOf(state, le.ev);
  const name = KIND_NAME[le.kind] ?? le.kind;
  const text = le.ev.firedAt !== null ? `${name}@${le.ev.firedAt}` : name;
  const detail =
    le.ev.firedAt !== null
      ? `${le.ev.entry.id} fired at ${le.ev.firedAt} (${le.ev.firedCause})`
      : le.ev.window
        ? `${le.ev.entry.id} window ${fmtWindow(le.ev.window.lb, le.ev.window.ub)}`
        : le.ev.entry.id;
  return `<span class="badge badge-${badge}" title="${esc(detail)}">${esc(text)}</span>`;
}

/** Window bar, cue button or fired mark for one event inside the track. */
function trackPiece(state: ViewState, le: LaneEvent, horizon: number): string {
  const ev = le.ev;
  if (ev.firedAt !== null) {
    return `<span class="mark mark-${badgeOf(state, ev)}" style="left:${pct(ev.firedAt, horizon)}" title="${esc(ev.entry.id)}@${ev.firedAt}"></span>`;
  }
  if (!ev.window) return "";
  const { lb, ub } = ev.window;
  const right = ub === null ? horizon : ub;
  const left = pct(lb, horizon);
  // zero-length windows still get a sliver wide enough to see and hit
  const width = pct(Math.max(right - lb, horizon * 0.008), horizon);
  const openCls = ub === null ? " open" : "";
  const title = `${ev.entry.id} ${fmtWindow(lb, ub)}`;
  if (ev.entry.interactive && ev.enabled && state.status === "running") {
    return (
      `<button class="cue" data-trigger="${esc(ev.entry.id)}" style="left:${left};width:${width}" ` +
      `title="${esc(title)}">${esc(ev.entry.id)}</button>`
    );
  }
  const enabledCls = ev.enabled && state.status === "running" ? " enabled" : "";
  return `<span class="bar${openCls}${enabledCls}" style="left:${left};width:${width}" title="${esc(title)}"></span>`;
}

/** The realized block of a static object, once its start has fired. */
function realizedSpan(events: LaneEvent[], playhead: number, horizon: number): string {
  const start = events.find((l) => l.kind === "startPoint")?.ev;
  const end = events.find((l) => l.kind === "endPoint")?.ev;
  if (!start || start.firedAt === null) return "";
  const from = start.firedAt;
  const to = end && end.firedAt !== null ? end.firedAt : Math.max(playhead, from);
  const cls = end && end.firedAt !== null ? "span" : "span running";
  return `<span class="${cls}" style="left:${pct(from, horizon)};width:${pct(to - from, horizon)}"></span>`;
}

function laneRow(state: ViewState, obj: ScoreObject, playhead: number, horizon: number): string {
  const events = laneEvents(state, obj.id);
  const chips = events.map((le) => badgeChip(state, le)).join("");
  const pieces =
    realizedSpan(events, playhead, horizon) +
    events.map((le) => trackPiece(state, le, horizon)).join("");
  return (
    `<div class="lane"><div class="lane-name"><span class="oid">${esc(obj.id)}</span>` +
    `<span class="dur">${esc(fmtDuration(obj))}</span>${chips}</div>` +
    `<div class="track">${pieces}</div></div>`
  );
}

function renderObjectTree(
  state: ViewState,
  obj: ScoreObject,
  byParent: Map<string, ScoreObject[]>,
  playhead: number,
  horizon: number,
): string {
  const row = laneRow(state, obj, playhead, horizon);
  const kids = byParent.get(obj.id);
  if (!kids || !kids.length) return row;
  const inner = kids.map((k) => renderObjectTree(state, k, byParent, playhead, horizon)).join("");
  return `<section class="frame">${row}<div class="frame-body">${inner}</div></section>`;
}

function renderAxis(horizon: number): string {
  const step = Math.max(1, Math.ceil(horizon / 12));
  const ticks: string[] = [];
  for (let t = 0; t <= horizon; t += step) {
    ticks.push(`<span class="tick" style="left:${pct(t, horizon)}">${t}</span>`);
  }
  return `<div class="lane axis"><div class="lane-name"></div><div class="track">${ticks.join("")}</div></div>`;
}

function renderHeader(state: ViewState, playhead: number): string {
  const name = state.name === null ? "waiting for score" : state.name;
  const chips = [`<span class="chip chip-${state.status}">${state.status}</span>`];
  if (state.speedAnnounced) {
    chips.push(
      state.speed === 0
        ? `<span class="chip chip-paused">paused</span>`
        : `<span class="chip chip-speed">x${state.speed}</span>`,
    );
  }
  if (state.dropped > 0) {
    chips.push(`<span class="chip chip-stale">${state.dropped} stale dropped</span>`);
  }
  return (
    `<header><h1>${esc(name)}</h1>${chips.join("")}` +
    `<span class="clock">t=${playhead.toFixed(playhead === Math.floor(playhead) ? 0 : 1)}</span></header>`
  );
}

function renderToasts(state: ViewState): string {
  const shown = state.toasts.slice(-TOASTS_SHOWN);
  if (!shown.length) return "";
  const items = shown
    .map(
      (t) =>
        `<div class="toast">rejected <b>${esc(t.event)}</b>: ${esc(t.reason)}, window ${esc(
          fmtWindow(t.lb, t.ub),
        )}</div>`,
    )
    .join("");
  return `<div class="toasts">${items}</div>`;
}

function renderTrace(state: ViewState): string {
  if (state.status === "running" || !state.trace.length) return "";
  const rows = state.trace
    .map(
      (r) =>
        `<tr><td>${r.time}</td><td>${esc(r.event)}</td><td>${esc(r.cause)}</td>` +
        `<td>${esc(r.actions.join(", "))}</td></tr>`,
    )
    .join("");
  return (
    `<section class="trace"><h2>trace</h2><table>` +
    `<thead><tr><th>t</th><th>event</th><th>cause</th><th>actions</th></tr></thead>` +
    `<tbody>${rows}</tbody></table></section>`
  );
}

function renderLog(state: ViewState): string {
  const lines = state.log
    .slice(-LOG_LINES)
    .map((l) => `<div class="logline">${esc(l)}</div>`)
    .join("");
  return `<section class="log"><h2>messages</h2><div class="loglines">${lines}</div></section>`;
}

export function renderApp(state: ViewState, playhead: number): string {
  const banner =
    state.connection === "open"
      ? ""
      : `<div class="banner banner-${state.connection}">` +
        (state.connection === "lost" ? "connection lost, retrying" : "connecting") +
        `</div>`;
  if (state.name === null) {
    return banner + renderHeader(state, playhead) + `<p class="empty">no score yet</p>`;
  }
  const horizon = horizonOf(state, playhead);
  const ids = new Set(state.objects.map((o) => o.id));
  const byParent = new Map<string, ScoreObject[]>();
  const roots: ScoreObject[] = [];
  for (const obj of state.objects) {
    if (obj.parent !== undefined && ids.has(obj.parent)) {
      const siblings = byParent.get(obj.parent) ?? [];
      siblings.push(obj);
      byParent.set(obj.parent, siblings);
    } else {
      roots.push(obj);
    }
  }
  const lanes = roots.map((o) => renderObjectTree(state, o, byParent, playhead, horizon)).join("");
  const frac = Math.min(playhead / horizon, 1);
  const playheadEl =
    `<div class="playhead" style="left:calc(${NAME_COL} + (100% - ${NAME_COL}) * ${frac.toFixed(4)})"></div>`;
  return (
    banner +
    renderHeader(state, playhead) +
    `<div class="timeline">${renderAxis(horizon)}${lanes}${playheadEl}</div>` +
    renderToasts(state) +
    renderTrace(state) +
    renderLog(state)
  );
}
