/** Wire types mirroring the service's JSON payloads. */

export type Label = "relevant" | "irrelevant";

export interface RankingEntry {
  position: number;
  doc_id: string;
  score: number;
  title: string;
  snippet: string;
}

export interface RankingPage {
  session_id: string;
  round: number;
  total: number;
  offset: number;
  limit: number;
  entries: RankingEntry[];
}

export interface SessionCreated {
  session_id: string;
  corpus_id: string;
  sr_id: string;
  model: string;
  round: number;
  ranking: RankingPage;
}

export interface SessionCreateRequest {
  corpus_id: string;
  sr_id: string;
  seed_doc_ids: string[];
  model: string;
  params?: { lambda?: number; use_position?: boolean; use_two_way?: boolean };
}

export interface LabelsAccepted {
  session_id: string;
  accepted: number;
  pending_total: number;
  duplicate: boolean;
}

export interface UpdateResponse {
  session_id: string;
  round: number;
  ranking: RankingPage;
}

export interface ProgressPoint {
  round: number;
  labels: number;
  relevant_found: number;
  recall: number | null;
}

export interface Progress {
  session_id: string;
  round: number;
  labels_total: number;
  pending: number;
  relevant_found: number;
  total_relevant: number | null;
  curve: ProgressPoint[];
}

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}
