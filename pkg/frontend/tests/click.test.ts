// @vitest-environment happy-dom
//
// A performer's click on an enabled cue must become exactly one
// well-formed trigger frame, and clicks anywhere else must become
// nothing. Uses the recorded finished run, stopped at the moment the
// cue opens.

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { beforeEach, describe, expect, it } from "vitest";

import { wireTriggerClicks } from "../src/client.js";
import { parseServerMessage, triggerMessage } from "../src/protocol.js";
import { renderApp } from "../src/render.js";
import { initialState, playheadAt, reduce, withConnection } from "../src/state.js";
import type { ViewState } from "../src/state.js";

// cwd is the package root whenever vitest runs (URL games break under happy-dom)
const STREAM = join(process.cwd(), "tests", "fixtures", "finished.ndjson");

/** Fold the recorded run up to and including the frame that enables the cue. */
function stateAtOpenCue(): ViewState {
  let state = withConnection(initialState(), "open");
  for (const line of readFileSync(STREAM, "utf8").split("\n")) {
    const msg = parseServerMessage(line);
    if (!msg) continue;
    state = reduce(state, msg);
    if (msg.type === "window" && msg.event === "go" && msg.enabled) return state;
  }
  throw new Error("recorded stream never enabled the cue");
}

describe("cue clicks", () => {
  let frames: string[];

  beforeEach(() => {
    const state = stateAtOpenCue();
    expect(state.status).toBe("running");
    expect(state.events["go"].enabled).toBe(true);
    expect(state.events["go"].firedAt).toBeNull();
    // fresh mount per test so no listener outlives its test
    document.body.innerHTML = "";
    const root = document.createElement("div");
    document.body.appendChild(root);
    root.innerHTML = renderApp(state, playheadAt(state, 0));
    frames = [];
    // same composition main.ts uses: delegated click -> trigger frame
    wireTriggerClicks(root, (id) => frames.push(triggerMessage(id)));
  });

  it("turns one click on the enabled cue into one trigger frame", () => {
    const button = document.querySelector<HTMLButtonElement>('button[data-trigger="go"]');
    expect(button).not.toBeNull();
    button!.click();
    expect(frames).toHaveLength(1);
    expect(JSON.parse(frames[0])).toEqual({ type: "trigger", event: "go" });
  });

  it("ignores clicks that land anywhere else", () => {
    document.querySelector<HTMLElement>(".lane-name")!.click();
    document.querySelector<HTMLElement>("h1")!.click();
    document.body.click();
    expect(frames).toEqual([]);
  });

  it("sends one frame per click, not per render", () => {
    const button = document.querySelector<HTMLButtonElement>('button[data-trigger="go"]');
    button!.click();
    button!.click();
    expect(frames).toEqual([triggerMessage("go"), triggerMessage("go")]);
  });
});
