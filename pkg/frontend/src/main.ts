// Entry point: wire the socket to the reducer, the reducer to the
// renderer, and clicks back to the engine. The page re-renders only
// when a message changes the state; between messages an animation
// frame loop moves just the playhead marker, so cue buttons stay put
// under the performer's pointer.

import { LiveClient, wireTriggerClicks } from "./client.js";
import { NAME_COL, horizonOf, renderApp } from "./render.js";
import { initialState, playheadAt, reduce, withConnection } from "./state.js";
import type { ViewState } from "./state.js";

const mount = document.getElementById("app");
if (!mount) throw new Error("missing #app element");
const root: HTMLElement = mount;

let state: ViewState = initialState();
let horizon = 1;
let rendered = "";

function draw(): void {
  const playhead = playheadAt(state, performance.now());
  const html = renderApp(state, playhead);
  horizon = horizonOf(state, playhead);
  if (html !== rendered) {
    rendered = html;
    root.innerHTML = html;
  }
}

function update(next: ViewState): void {
  state = next;
  draw();
}

const client = new LiveClient(
  `ws://${location.host}/`,
  (msg) => update(reduce(state, msg, performance.now())),
  (c) => update(withConnection(state, c)),
);

wireTriggerClicks(root, (id) => client.trigger(id));
document.getElementById("pause")?.addEventListener("click", () => client.pause());
document.getElementById("resume")?.addEventListener("click", () => client.resume());

function frame(): void {
  const playhead = playheadAt(state, performance.now());
  const marker = root.querySelector<HTMLElement>(".playhead");
  if (marker) {
    const frac = Math.min(playhead / horizon, 1);
    marker.style.left = `calc(${NAME_COL} + (100% - ${NAME_COL}) * ${frac.toFixed(4)})`;
  }
  const clock = root.querySelector(".clock");
  if (clock) {
    clock.textContent = `t=${playhead.toFixed(playhead === Math.floor(playhead) ? 0 : 1)}`;
  }
  requestAnimationFrame(frame);
}

client.connect();
requestAnimationFrame(frame);
