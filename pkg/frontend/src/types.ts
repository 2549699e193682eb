/** Wire types for the deconv HTTP API (see the backend's docs/api.md). */

export interface TokenInfo {
  text: string;
  /** Canonical leaf index (the &i_ mark); null for punctuation. */
  i: number | null;
  /** UNL graph node index; null for punctuation. */
  n: number | null;
  start: number;
  end: number;
}

export interface UtteranceInfo {
  id: string;
  index: number;
  version: number;
  dirty_from: string | null;
  rendered?: string;
  marked?: string;
  tokens?: TokenInfo[];
}

export interface ValidationIssue {
  severity: "error" | "warning";
  code: string;
  locus: string;
  message: string;
}

export interface ValidationReport {
  ok: boolean;
  issues: ValidationIssue[];
}

export interface SessionCreated {
  session: string;
  utterances: { id: string; validation: ValidationReport }[];
}

export interface Candidate {
  uw: string;
  lu: string;
  pos: string;
  score: number;
}

export interface NodeAttribute {
  name: string;
  /** True when the value was assumed from profile defaults, not the source. */
  defaulted: boolean;
}

export interface CandidateList {
  node: number;
  uw: string;
  current: string | null;
  candidates: Candidate[];
  attributes?: NodeAttribute[];
}

export interface TraceEntry {
  stage: string;
  n?: number;
  t?: number;
  i?: number;
  dec?: Record<string, string | string[]>;
}

export interface ReplaceResult {
  changed: string[];
  skipped: { utterance: number; node: number; reason: string }[];
  utterances: UtteranceInfo[];
}

export type Policy = "always" | "every-k" | "on-demand";

export interface PolicyState {
  policy: Policy;
  k: number;
}
