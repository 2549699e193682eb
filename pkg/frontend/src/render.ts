/** Pure view-model builders: ViewState in, plain display structures out.
 *
 * The DOM layer maps these one-to-one onto elements; keeping them pure
 * makes the whole presentation testable without a browser.
 */

import { attributeLabel, policyLabel, relationLabel, stageLabel, STYLE_OPTIONS } from "./labels.js";
import type { Selection, UtteranceView, ViewState } from "./state.js";
import type { TraceEntry } from "./types.js";

export interface TokenVM {
  text: string;
  clickable: boolean;
  selected: boolean;
  tokenIndex: number | null;
  spaceBefore: boolean;
}

export interface UtteranceVM {
  id: string;
  tokens: TokenVM[];
  badges: string[]; // "needs regeneration" | "changed" | "rejected"
  issues: string[];
}

export function utteranceVM(view: UtteranceView, selected: Selection | null): UtteranceVM {
  const badges: string[] = [];
  if (view.validation !== null && !view.validation.ok) {
    badges.push("rejected");
  }
  if (view.stale) {
    badges.push("needs regeneration");
  }
  if (view.changed) {
    badges.push("changed");
  }
  if (view.pendingLu !== null) {
    badges.push("saving…");
  }
  const tokens: TokenVM[] = view.tokens.map((token, idx) => ({
    text: token.text,
    clickable: token.i !== null,
    selected:
      selected !== null &&
      selected.utterance === view.id &&
      selected.tokenIndex === token.i &&
      token.i !== null,
    tokenIndex: token.i,
    spaceBefore: idx > 0 && view.tokens[idx - 1].end < token.start,
  }));
  return {
    id: view.id,
    tokens,
    badges,
    issues: (view.validation?.issues ?? []).map(
      (i) => `${i.severity === "error" ? "problem" : "note"}: ${i.message}`,
    ),
  };
}

export interface CandidateVM {
  lu: string;
  description: string;
  current: boolean;
  fromWidening: boolean;
}

export interface CandidatePanelVM {
  title: string;
  widened: boolean;
  candidates: CandidateVM[];
}

export function candidatePanelVM(state: ViewState): CandidatePanelVM | null {
  if (state.selected === null || state.candidates === null) {
    return null; // panel exists only under a selection
  }
  const current = state.candidates.current;
  const narrowUw = state.candidates.uw;
  return {
    title: `Words for “${state.selected.tokenText}”`,
    widened: state.widened,
    candidates: state.candidates.candidates.map((c) => ({
      lu: c.lu,
      description: c.lu + (c.score > 1 ? " (often chosen)" : ""),
      current: c.lu === current,
      fromWidening: state.widened && c.uw !== narrowUw,
    })),
  };
}

export interface TraceRowVM {
  stage: string;
  summary: string;
}

export function traceVM(chain: TraceEntry[] | null): TraceRowVM[] {
  if (chain === null) {
    return [];
  }
  return chain.map((entry) => {
    if (entry.stage === "graph") {
      return { stage: stageLabel("graph"), summary: `concept #${entry.n}` };
    }
    const dec = entry.dec ?? {};
    const role = typeof dec["RL"] === "string" ? relationLabel(dec["RL"] as string) : null;
    const lemma = (dec["LEMMA"] ?? dec["LU"]) as string | undefined;
    const parts = [lemma, role].filter((p): p is string => Boolean(p));
    return { stage: stageLabel(entry.stage), summary: parts.join(" — ") || "(structure)" };
  });
}

export interface AttributePanelVM {
  title: string;
  currentAttributes: string[];
  styleOptions: { name: string; value: string; label: string }[];
}

export function attributePanelVM(state: ViewState): AttributePanelVM | null {
  if (state.selected === null) {
    return null;
  }
  let attrs: string[];
  if (state.candidates?.attributes !== undefined) {
    // assumed (profile-defaulted) values are flagged as such
    attrs = state.candidates.attributes.map(
      (a) => attributeLabel(a.name) + (a.defaulted ? " (assumed)" : ""),
    );
  } else {
    const chain = state.trace ?? [];
    const src = chain.length > 0 ? chain[0].dec?.["SRC"] : undefined;
    attrs = Array.isArray(src) ? src.map(attributeLabel) : [];
  }
  return {
    title: `Details for “${state.selected.tokenText}”`,
    currentAttributes: attrs,
    styleOptions: STYLE_OPTIONS,
  };
}

export interface StatusVM {
  policy: string;
  busy: boolean;
  error: string | null;
  staleCount: number;
}

export function statusVM(state: ViewState): StatusVM {
  return {
    policy: `Regenerate ${policyLabel(state.policy)}`,
    busy: state.busy,
    error: state.error,
    staleCount: state.utterances.filter((u) => u.stale).length,
  };
}
