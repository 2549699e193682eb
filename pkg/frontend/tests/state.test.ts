import { describe, expect, it } from "vitest";

import {
  clearSelection,
  initialState,
  markChanged,
  withCandidates,
  withPendingChoice,
  withSelection,
  withSession,
  withUtterances,
} from "../src/state";
import type { CandidateList, TokenInfo, UtteranceInfo } from "../src/types";

const TOKEN: TokenInfo = { text: "chaise", i: 5, n: 3, start: 18, end: 24 };
const PUNCT: TokenInfo = { text: ".", i: null, n: null, start: 24, end: 25 };

function sessionState() {
  return withSession(initialState(), "s1", [
    { id: "u0", validation: { ok: true, issues: [] } },
    { id: "u1", validation: { ok: true, issues: [] } },
  ]);
}

function info(id: string, rendered: string, version = 0): UtteranceInfo {
  return {
    id,
    index: Number(id.slice(1)),
    version,
    dirty_from: null,
    rendered,
    marked: rendered,
    tokens: [TOKEN],
  };
}

describe("session state", () => {
  it("starts utterances stale until deconverted", () => {
    const state = sessionState();
    expect(state.utterances.every((u) => u.stale)).toBe(true);
    expect(state.session).toBe("s1");
  });

  it("merges utterance updates and clears staleness", () => {
    const state = withUtterances(sessionState(), [info("u0", "La femme voit la chaise.")]);
    expect(state.utterances[0].stale).toBe(false);
    expect(state.utterances[0].rendered).toContain("chaise");
    expect(state.utterances[1].stale).toBe(true);
  });

  it("flags an utterance as changed when its rendering differs", () => {
    let state = withUtterances(sessionState(), [info("u0", "La femme voit la chaise.")]);
    state = withUtterances(state, [info("u0", "La femme voit le fauteuil.", 1)]);
    expect(state.utterances[0].changed).toBe(true);
    expect(state.utterances[0].version).toBe(1);
  });
});

describe("selection invariants", () => {
  it("selects content tokens only", () => {
    let state = withUtterances(sessionState(), [info("u0", "x")]);
    state = withSelection(state, "u0", TOKEN);
    expect(state.selected).not.toBeNull();
    expect(state.selected?.node).toBe(3);
    state = withSelection(state, "u0", PUNCT);
    expect(state.selected).toBeNull();
  });

  it("never shows a candidate panel without a selection", () => {
    const list: CandidateList = { node: 3, uw: "x", current: null, candidates: [] };
    const state = withCandidates(initialState(), list, false);
    expect(state.candidates).toBeNull();
  });

  it("clearing the selection drops panels and trace", () => {
    let state = withUtterances(sessionState(), [info("u0", "x")]);
    state = withSelection(state, "u0", TOKEN);
    state = withCandidates(
      state,
      { node: 3, uw: "x", current: "chaise", candidates: [] },
      false,
    );
    state = clearSelection(state);
    expect(state.candidates).toBeNull();
    expect(state.trace).toBeNull();
  });
});

describe("optimistic bookkeeping", () => {
  it("marks and rolls back pending choices by value", () => {
    const before = withUtterances(sessionState(), [info("u0", "x")]);
    const pending = withPendingChoice(before, "u0", "fauteuil");
    expect(pending.utterances[0].pendingLu).toBe("fauteuil");
    expect(before.utterances[0].pendingLu).toBeNull(); // no mutation
  });

  it("markChanged touches only the listed utterances", () => {
    const state = markChanged(sessionState(), ["u1"]);
    expect(state.utterances[0].changed).toBe(false);
    expect(state.utterances[1].changed).toBe(true);
  });
});
