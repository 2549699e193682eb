/** Typed client for the deconv service.
 *
 * The fetch implementation is injected so tests can run against a fake
 * server; the app passes window.fetch.
 */

import type {
  CandidateList,
  Policy,
  PolicyState,
  ReplaceResult,
  SessionCreated,
  TraceEntry,
  UtteranceInfo,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public detail?: unknown,
  ) {
    super(message);
  }

  get isConflict(): boolean {
    return this.status === 409;
  }
}

async function unwrap<T>(resp: Response): Promise<T> {
  if (resp.ok) {
    return (await resp.json()) as T;
  }
  let detail: unknown;
  let message = `${resp.status}`;
  try {
    const body = await resp.json();
    detail = body;
    if (typeof body?.detail === "string") message = body.detail;
  } catch {
    /* non-JSON error body */
  }
  throw new ApiError(resp.status, message, detail);
}

export class ApiClient {
  constructor(
    private base: string,
    private fetchImpl: FetchLike,
  ) {}

  private url(path: string): string {
    return this.base.replace(/\/$/, "") + path;
  }

  private async post<T>(path: string, body?: unknown): Promise<T> {
    return unwrap<T>(
      await this.fetchImpl(this.url(path), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: body === undefined ? "{}" : JSON.stringify(body),
      }),
    );
  }

  async createSession(document: string, seed = 0): Promise<SessionCreated> {
    return this.post("/sessions", { document, seed });
  }

  async deconvert(session: string): Promise<{ utterances: UtteranceInfo[] }> {
    return this.post(`/sessions/${session}/deconvert`);
  }

  async trace(
    session: string,
    utterance: string,
    tokenIndex: number,
  ): Promise<{ chain: TraceEntry[] }> {
    const resp = await this.fetchImpl(
      this.url(`/sessions/${session}/utterances/${utterance}/tokens/${tokenIndex}/trace`),
    );
    return unwrap(resp);
  }

  async candidates(
    session: string,
    utterance: string,
    node: number,
    widen: boolean,
  ): Promise<CandidateList> {
    const resp = await this.fetchImpl(
      this.url(
        `/sessions/${session}/utterances/${utterance}/nodes/${node}/candidates?widen=${widen}`,
      ),
    );
    return unwrap(resp);
  }

  async choose(
    session: string,
    utterance: string,
    node: number,
    lu: string,
    version: number,
  ): Promise<{ utterance: UtteranceInfo }> {
    return this.post(`/sessions/${session}/utterances/${utterance}/nodes/${node}/choose`, {
      lu,
      version,
    });
  }

  async setAttribute(
    session: string,
    utterance: string,
    node: number,
    name: string,
    value: string | null,
    level: "interlingual" | "style",
    version: number,
  ): Promise<{ utterance: UtteranceInfo }> {
    return this.post(
      `/sessions/${session}/utterances/${utterance}/nodes/${node}/attributes`,
      { name, value, level, version },
    );
  }

  async replace(session: string, fromLu: string, toLu: string): Promise<ReplaceResult> {
    return this.post(`/sessions/${session}/replace`, { from_lu: fromLu, to_lu: toLu });
  }

  async setPolicy(session: string, policy: Policy, k?: number): Promise<PolicyState> {
    return unwrap(
      await this.fetchImpl(this.url(`/sessions/${session}/policy`), {
        method: "PUT",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(k === undefined ? { policy } : { policy, k }),
      }),
    );
  }

  async redeconvert(session: string): Promise<{ utterances: UtteranceInfo[] }> {
    return this.post(`/sessions/${session}/redeconvert`);
  }

  async exportDocument(session: string): Promise<string> {
    const resp = await this.fetchImpl(this.url(`/sessions/${session}/export`));
    if (!resp.ok) {
      throw new ApiError(resp.status, `${resp.status}`);
    }
    return resp.text();
  }
}
