/** Screening view state: optimistic label queue reconciled with the server.
 *
 * Labels queue locally while the reviewer works through the displayed page;
 * a submit posts the whole batch (exactly once, via an idempotency token),
 * triggers a re-rank, and reloads page 1. The round counter always mirrors
 * the server's history length; every displayed number comes from a server
 * payload untouched.
 */

import { ApiClient } from "./api.js";
import {
  ApiError,
  Label,
  Progress,
  RankingPage,
  SessionCreateRequest,
} from "./types.js";

export const BATCH_HINT = 20;

export interface QueuedLabel {
  doc_id: string;
  label: Label;
}

export interface ScreeningViewState {
  sessionId: string | null;
  page: RankingPage | null;
  pending: QueuedLabel[];
  round: number;
  progress: Progress | null;
  conflicts: string[];
  cursor: number;
  lastError: string | null;
}

function newToken(): string {
  if (typeof crypto !== "undefined" && "randomUUID" in crypto) {
    return crypto.randomUUID();
  }
  return `tok-${Date.now()}-${Math.random().toString(36).slice(2)}`;
}

export class ScreeningStore {
  state: ScreeningViewState = {
    sessionId: null,
    page: null,
    pending: [],
    round: 0,
    progress: null,
    conflicts: [],
    cursor: 0,
    lastError: null,
  };

  /** Token for the in-flight batch; reused on retry so submits are exactly-once. */
  private batchToken: string | null = null;
  private listeners: Array<() => void> = [];

  constructor(private api: ApiClient) {}

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const fn of this.listeners) fn();
  }

  async createSession(req: SessionCreateRequest): Promise<void> {
    const created = await this.api.createSession(req);
    this.state.sessionId = created.session_id;
    this.state.page = created.ranking;
    this.state.round = created.round;
    this.state.pending = [];
    this.state.conflicts = [];
    this.state.cursor = 0;
    this.state.progress = await this.api.progress(created.session_id);
    this.emit();
  }

  /** Attach to an existing session (fresh tab / forced reload). */
  async load(sessionId: string): Promise<void> {
    this.state.sessionId = sessionId;
    this.state.page = await this.api.ranking(sessionId);
    this.state.round = this.state.page.round;
    this.state.progress = await this.api.progress(sessionId);
    this.state.pending = [];
    this.state.conflicts = [];
    this.state.cursor = 0;
    this.emit();
  }

  /** Docs on the current page that are not locally labeled yet. */
  unlabeledOnPage(): string[] {
    if (!this.state.page) return [];
    const queued = new Set(this.state.pending.map((p) => p.doc_id));
    return this.state.page.entries.map((e) => e.doc_id).filter((d) => !queued.has(d));
  }

  queueLabel(docId: string, label: Label): void {
    const page = this.state.page;
    if (!page) throw new Error("no ranking page loaded");
    if (!page.entries.some((e) => e.doc_id === docId)) {
      throw new Error(`document ${docId} is not on the displayed page`);
    }
    if (this.state.pending.some((p) => p.doc_id === docId)) {
      throw new Error(`document ${docId} already has a queued label`);
    }
    this.state.pending.push({ doc_id: docId, label });
    this.advanceCursor();
    this.emit();
  }

  unqueueLabel(docId: string): void {
    this.state.pending = this.state.pending.filter((p) => p.doc_id !== docId);
    this.emit();
  }

  labelAtCursor(label: Label): void {
    const doc = this.docAtCursor();
    if (doc) this.queueLabel(doc, label);
  }

  docAtCursor(): string | null {
    const page = this.state.page;
    if (!page || page.entries.length === 0) return null;
    const entry = page.entries[Math.min(this.state.cursor, page.entries.length - 1)];
    return entry ? entry.doc_id : null;
  }

  moveCursor(delta: number): void {
    const page = this.state.page;
    if (!page || page.entries.length === 0) return;
    const max = page.entries.length - 1;
    this.state.cursor = Math.min(max, Math.max(0, this.state.cursor + delta));
    this.emit();
  }

  private advanceCursor(): void {
    const page = this.state.page;
    if (!page) return;
    const queued = new Set(this.state.pending.map((p) => p.doc_id));
    for (let i = this.state.cursor; i < page.entries.length; i++) {
      const entry = page.entries[i];
      if (entry && !queued.has(entry.doc_id)) {
        this.state.cursor = i;
        return;
      }
    }
    this.state.cursor = Math.max(0, page.entries.length - 1);
  }

  batchReady(): boolean {
    return this.state.pending.length >= BATCH_HINT;
  }

  /** Post the queued batch, re-rank, and reload page 1 plus progress. */
  async submitAndRerank(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) throw new Error("no session");
    if (this.state.pending.length === 0) return;
    if (this.batchToken === null) this.batchToken = newToken();
    try {
      await this.api.submitLabels(sessionId, this.state.pending, this.batchToken);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        await this.reconcileConflicts();
        return;
      }
      this.state.lastError = err instanceof Error ? err.message : String(err);
      this.emit();
      throw err; // token retained: a retry reuses it
    }
    this.batchToken = null;
    this.state.pending = [];
    const updated = await this.api.update(sessionId);
    this.state.round = updated.round;
    this.state.page = updated.ranking;
    this.state.cursor = 0;
    this.state.conflicts = [];
    this.state.progress = await this.api.progress(sessionId);
    this.state.lastError = null;
    this.emit();
  }

  /** After a 409: flag queued docs the server already has labels for and
   *  keep the rest queued for resubmission. */
  private async reconcileConflicts(): Promise<void> {
    const sessionId = this.state.sessionId!;
    const page = await this.api.ranking(sessionId, 0, this.state.page?.limit ?? 20);
    const stillUnlabeled = new Set(page.entries.map((e) => e.doc_id));
    const conflicts = this.state.pending
      .filter((p) => !stillUnlabeled.has(p.doc_id))
      .map((p) => p.doc_id);
    this.state.conflicts = conflicts;
    this.state.pending = this.state.pending.filter((p) => stillUnlabeled.has(p.doc_id));
    this.state.page = page;
    this.state.round = page.round;
    this.batchToken = null; // remaining labels form a new batch
    this.state.lastError = `submission conflict: ${conflicts.join(", ")}`;
    this.emit();
  }
}
