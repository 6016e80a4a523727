// Shapes of the session-service API bodies.

export interface DeclInfo {
  name: string;
  dim: number;
  ranges: [number, number][];
}

export interface DisplayHints {
  value_names?: Record<string, string[]>;
}

export interface SpecInfo {
  name: string;
  title: string;
  params: string;
  outcomes: string[];
  n_targets: number;
  n_queries: number;
  tier: string;
  query_decls: DeclInfo[];
  target_decls: DeclInfo[];
  display?: DisplayHints | null;
}

export interface PendingQuery {
  values: number[];
  entropy_bits: number;
  candidate_count: number;
}

export interface SessionCreated {
  session_id: string;
  spec: string;
  mode: string;
  status: string;
  outcomes: string[];
  round: number;
  candidate_count: number;
  pending_query: PendingQuery | null;
  query_decls: DeclInfo[];
  target_decls: DeclInfo[];
  display?: DisplayHints | null;
}

export interface InconsistencyInfo {
  empty_at_round: number;
  flip_round: number | null;
  restoring_outcomes: string[];
  message: string;
}

export interface AnswerResponse {
  session_id: string;
  status: string;
  round: number;
  outcome: string;
  candidate_count: number;
  pending_query?: PendingQuery | null;
  final_candidates?: number[][] | null;
  inconsistency?: InconsistencyInfo | null;
}

export interface RoundInfo {
  round: number;
  query: number[];
  entropy_bits: number;
  outcome: string;
  candidates_before: number;
  candidates_after: number;
}

export interface SessionSnapshot {
  session_id: string;
  spec: string;
  mode: string;
  status: string;
  outcomes: string[];
  round: number;
  candidate_count: number;
  pending_query: PendingQuery | null;
  transcript: RoundInfo[];
  final_candidates?: number[][] | null;
  inconsistency?: InconsistencyInfo | null;
  query_decls: DeclInfo[];
  target_decls: DeclInfo[];
  display?: DisplayHints | null;
}

export interface ApiErrorBody {
  error: string;
  message: string;
}
