/** View state and its pure transitions.
 *
 * Everything the page shows derives from this one structure; reloading the
 * page rebuilds it from the API. The transition functions never mutate
 * their input, which is what makes optimistic updates trivially
 * reversible: keep the previous state, roll back on a conflict.
 */

import type {
  CandidateList,
  Policy,
  TokenInfo,
  TraceEntry,
  UtteranceInfo,
  ValidationReport,
} from "./types.js";

export interface UtteranceView {
  id: string;
  index: number;
  version: number;
  rendered: string;
  tokens: TokenInfo[];
  validation: ValidationReport | null;
  /** True while stages are invalidated and not yet regenerated. */
  stale: boolean;
  /** True when the last operation changed this utterance's output. */
  changed: boolean;
  /** Optimistically substituted word, cleared when the server answers. */
  pendingLu: string | null;
}

export interface Selection {
  utterance: string;
  /** Canonical leaf index of the clicked token. */
  tokenIndex: number;
  node: number;
  tokenText: string;
}

export interface ViewState {
  session: string | null;
  utterances: UtteranceView[];
  selected: Selection | null;
  candidates: CandidateList | null;
  widened: boolean;
  trace: TraceEntry[] | null;
  policy: Policy;
  k: number;
  busy: boolean;
  error: string | null;
}

export function initialState(): ViewState {
  return {
    session: null,
    utterances: [],
    selected: null,
    candidates: null,
    widened: false,
    trace: null,
    policy: "always",
    k: 2,
    busy: false,
    error: null,
  };
}

function toView(info: UtteranceInfo, previous?: UtteranceView): UtteranceView {
  return {
    id: info.id,
    index: info.index,
    version: info.version,
    rendered: info.rendered ?? previous?.rendered ?? "",
    tokens: info.tokens ?? previous?.tokens ?? [],
    validation: previous?.validation ?? null,
    stale: info.dirty_from !== null,
    changed:
      previous !== undefined &&
      previous.rendered !== "" &&
      info.rendered !== undefined &&
      info.rendered !== previous.rendered,
    pendingLu: null,
  };
}

export function withSession(
  state: ViewState,
  session: string,
  reports: { id: string; validation: ValidationReport }[],
): ViewState {
  return {
    ...initialState(),
    session,
    policy: state.policy,
    k: state.k,
    utterances: reports.map((r, index) => ({
      id: r.id,
      index,
      version: 0,
      rendered: "",
      tokens: [],
      validation: r.validation,
      stale: true,
      changed: false,
      pendingLu: null,
    })),
  };
}

export function withUtterances(state: ViewState, infos: UtteranceInfo[]): ViewState {
  const byId = new Map(state.utterances.map((u) => [u.id, u]));
  const next = state.utterances.slice();
  for (const info of infos) {
    const previous = byId.get(info.id);
    const view = toView(info, previous);
    if (previous !== undefined) {
      next[previous.index] = { ...view, validation: previous.validation };
    } else {
      next[info.index] = view;
    }
  }
  return { ...state, utterances: next };
}

/** Selecting a token opens the panels; only content tokens are selectable. */
export function withSelection(
  state: ViewState,
  utterance: string,
  token: TokenInfo,
): ViewState {
  if (token.i === null || token.n === null) {
    return clearSelection(state);
  }
  return {
    ...state,
    selected: {
      utterance,
      tokenIndex: token.i,
      node: token.n,
      tokenText: token.text,
    },
    candidates: null,
    widened: false,
    trace: null,
  };
}

export function clearSelection(state: ViewState): ViewState {
  return { ...state, selected: null, candidates: null, widened: false, trace: null };
}

/** The candidate panel exists only under a selection (view invariant). */
export function withCandidates(
  state: ViewState,
  list: CandidateList,
  widened: boolean,
): ViewState {
  if (state.selected === null) {
    return state;
  }
  return { ...state, candidates: list, widened };
}

export function withTrace(state: ViewState, chain: TraceEntry[]): ViewState {
  if (state.selected === null) {
    return state;
  }
  return { ...state, trace: chain };
}

/** Optimistic word substitution, shown until the server answers. */
export function withPendingChoice(state: ViewState, utterance: string, lu: string): ViewState {
  return {
    ...state,
    utterances: state.utterances.map((u) =>
      u.id === utterance ? { ...u, pendingLu: lu } : u,
    ),
  };
}

export function withError(state: ViewState, message: string | null): ViewState {
  return { ...state, error: message };
}

export function withBusy(state: ViewState, busy: boolean): ViewState {
  return { ...state, busy };
}

export function withPolicy(state: ViewState, policy: Policy, k: number): ViewState {
  return { ...state, policy, k };
}

export function markChanged(state: ViewState, ids: string[]): ViewState {
  const hit = new Set(ids);
  return {
    ...state,
    utterances: state.utterances.map((u) =>
      hit.has(u.id) ? { ...u, changed: true } : u,
    ),
  };
}

export function staleUtterances(state: ViewState): UtteranceView[] {
  return state.utterances.filter((u) => u.stale);
}
