/** Posteditor controller: API calls plus state transitions.
 *
 * The controller owns a ViewState and notifies one listener after every
 * change; the DOM layer subscribes and re-renders. Mutations are
 * optimistic where that is safe (word choice) and roll back to the exact
 * previous state when the server reports a version conflict.
 */

import { ApiClient, ApiError } from "./api.js";
import {
  clearSelection,
  initialState,
  markChanged,
  staleUtterances,
  ViewState,
  withBusy,
  withCandidates,
  withError,
  withPendingChoice,
  withPolicy,
  withSelection,
  withSession,
  withTrace,
  withUtterances,
} from "./state.js";
import type { Policy, TokenInfo } from "./types.js";

export type Listener = (state: ViewState) => void;

export class Posteditor {
  state: ViewState = initialState();

  constructor(
    private api: ApiClient,
    private listener: Listener = () => undefined,
  ) {}

  private set(state: ViewState): void {
    this.state = state;
    this.listener(state);
  }

  private fail(err: unknown): void {
    const message =
      err instanceof ApiError
        ? err.isConflict
          ? "Someone else changed this sentence; it has been reloaded."
          : `The server rejected the request (${err.message}).`
        : `Request failed: ${String(err)}`;
    this.set(withBusy(withError(this.state, message), false));
  }

  async open(document: string, seed = 0): Promise<void> {
    this.set(withBusy(withError(this.state, null), true));
    try {
      const created = await this.api.createSession(document, seed);
      this.set(withSession(this.state, created.session, created.utterances));
      const result = await this.api.deconvert(created.session);
      this.set(withBusy(withUtterances(this.state, result.utterances), false));
    } catch (err) {
      this.fail(err);
    }
  }

  /** Clicking a token: select it, fetch candidates and the trace chain. */
  async selectToken(utterance: string, token: TokenInfo): Promise<void> {
    const state = withSelection(this.state, utterance, token);
    this.set(state);
    const selected = state.selected;
    if (selected === null || state.session === null) {
      return;
    }
    try {
      const [candidates, trace] = await Promise.all([
        this.api.candidates(state.session, utterance, selected.node, false),
        this.api.trace(state.session, utterance, selected.tokenIndex),
      ]);
      this.set(withTrace(withCandidates(this.state, candidates, false), trace.chain));
    } catch (err) {
      this.fail(err);
    }
  }

  /** The "show more words" button: widen the candidate search. */
  async widen(): Promise<void> {
    const { session, selected } = this.state;
    if (session === null || selected === null) {
      return;
    }
    try {
      const list = await this.api.candidates(session, selected.utterance, selected.node, true);
      this.set(withCandidates(this.state, list, true));
    } catch (err) {
      this.fail(err);
    }
  }

  /** Pick a candidate word; optimistic, rolled back on a 409 conflict. */
  async choose(lu: string): Promise<void> {
    const { session, selected } = this.state;
    if (session === null || selected === null) {
      return;
    }
    const before = this.state;
    const utterance = this.state.utterances.find((u) => u.id === selected.utterance);
    if (utterance === undefined) {
      return;
    }
    this.set(withPendingChoice(this.state, selected.utterance, lu));
    try {
      const result = await this.api.choose(
        session,
        selected.utterance,
        selected.node,
        lu,
        utterance.version,
      );
      const next = withUtterances(this.state, [result.utterance]);
      this.set(clearSelection(withError(next, null)));
    } catch (err) {
      this.set(before); // roll the optimistic mark back
      if (err instanceof ApiError && err.isConflict) {
        await this.refresh();
      }
      this.fail(err);
    }
  }

  /** Add an interlingual attribute or a style preference on the selection. */
  async setAttribute(name: string, value: string | null, level: "interlingual" | "style"): Promise<void> {
    const { session, selected } = this.state;
    if (session === null || selected === null) {
      return;
    }
    const before = this.state;
    const utterance = this.state.utterances.find((u) => u.id === selected.utterance);
    if (utterance === undefined) {
      return;
    }
    try {
      const result = await this.api.setAttribute(
        session,
        selected.utterance,
        selected.node,
        name,
        value,
        level,
        utterance.version,
      );
      this.set(clearSelection(withUtterances(withError(this.state, null), [result.utterance])));
    } catch (err) {
      this.set(before);
      if (err instanceof ApiError && err.isConflict) {
        await this.refresh();
      }
      this.fail(err);
    }
  }

  /** Document-wide replacement; changed utterances come back re-rendered. */
  async replaceEverywhere(fromLu: string, toLu: string): Promise<void> {
    const { session } = this.state;
    if (session === null) {
      return;
    }
    try {
      const result = await this.api.replace(session, fromLu, toLu);
      let next = withUtterances(this.state, result.utterances);
      next = markChanged(next, result.changed);
      if (result.skipped.length > 0) {
        next = withError(
          next,
          `${result.skipped.length} occurrence(s) kept: the word does not fit there.`,
        );
      }
      this.set(next);
    } catch (err) {
      this.fail(err);
    }
  }

  async setPolicy(policy: Policy, k?: number): Promise<void> {
    const { session } = this.state;
    if (session === null) {
      return;
    }
    try {
      const result = await this.api.setPolicy(session, policy, k);
      this.set(withPolicy(this.state, result.policy, result.k));
    } catch (err) {
      this.fail(err);
    }
  }

  /** Regenerate everything the edits left stale. */
  async redeconvert(): Promise<void> {
    const { session } = this.state;
    if (session === null) {
      return;
    }
    try {
      const result = await this.api.redeconvert(session);
      this.set(withUtterances(this.state, result.utterances));
    } catch (err) {
      this.fail(err);
    }
  }

  async refresh(): Promise<void> {
    const { session } = this.state;
    if (session === null) {
      return;
    }
    const result = await this.api.redeconvert(session);
    this.set(withUtterances(this.state, result.utterances));
  }

  async exportDocument(): Promise<string> {
    const { session } = this.state;
    if (session === null) {
      throw new Error("no session");
    }
    return this.api.exportDocument(session);
  }

  hasStale(): boolean {
    return staleUtterances(this.state).length > 0;
  }
}
