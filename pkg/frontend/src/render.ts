/** Pure HTML-string renderers; every number shown is copied verbatim from a
 * server payload (scores via String(...), nothing recomputed client-side). */

import { ScreeningViewState } from "./state.js";
import { Progress, RankingEntry } from "./types.js";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderCard(
  entry: RankingEntry,
  opts: { queued?: string; active?: boolean; conflict?: boolean } = {},
): string {
  const classes = ["card"];
  if (opts.active) classes.push("active");
  if (opts.queued) classes.push(`queued-${opts.queued}`);
  if (opts.conflict) classes.push("conflict");
  const badge = opts.queued
    ? `<span class="badge">${opts.queued}</span>`
    : opts.conflict
      ? `<span class="badge conflict">already labeled</span>`
      : "";
  return [
    `<article class="${classes.join(" ")}" data-doc="${escapeHtml(entry.doc_id)}">`,
    `<header><span class="rank">#${entry.position}</span>`,
    `<span class="score">score ${String(entry.score)}</span>${badge}</header>`,
    `<h3>${escapeHtml(entry.title)}</h3>`,
    `<p>${escapeHtml(entry.snippet)}</p>`,
    `</article>`,
  ].join("");
}

export function renderQueue(state: ScreeningViewState): string {
  const page = state.page;
  if (!page) {
    return `<div class="empty">No session loaded.</div>`;
  }
  if (page.total === 0) {
    return `<div class="banner done">Screening complete: no unlabeled documents remain.</div>`;
  }
  const queued = new Map(state.pending.map((p) => [p.doc_id, p.label]));
  const conflicts = new Set(state.conflicts);
  const cards = page.entries.map((entry, i) =>
    renderCard(entry, {
      queued: queued.get(entry.doc_id),
      active: i === state.cursor,
      conflict: conflicts.has(entry.doc_id),
    }),
  );
  return cards.join("\n");
}

export function renderStatusBar(state: ScreeningViewState): string {
  const page = state.page;
  const total = page ? page.total : 0;
  const hint =
    state.pending.length >= 20
      ? `<strong class="hint">batch ready: submit to re-rank</strong>`
      : "";
  return [
    `<span class="round">round ${state.round}</span>`,
    `<span class="pending">${state.pending.length} queued</span>`,
    `<span class="remaining">${total} unlabeled</span>`,
    hint,
  ].join(" ");
}

/** Chart data for the progress panel: one point per completed round. */
export interface ChartPoint {
  x: number; // labels spent
  y: number; // relevant found
  recall: number | null;
}

export function progressChartData(progress: Progress | null): ChartPoint[] {
  if (!progress) return [];
  return progress.curve.map((p) => ({ x: p.labels, y: p.relevant_found, recall: p.recall }));
}

export function renderProgressPanel(progress: Progress | null): string {
  const points = progressChartData(progress);
  if (points.length === 0) {
    return `<div class="chart empty">No labels submitted yet.</div>`;
  }
  const maxX = Math.max(...points.map((p) => p.x), 1);
  const maxY = Math.max(...points.map((p) => p.y), 1);
  const w = 240;
  const h = 120;
  const coords = points
    .map((p) => `${(p.x / maxX) * w},${h - (p.y / maxY) * h}`)
    .join(" ");
  const recall = points
    .filter((p) => p.recall !== null)
    .map((p) => `<li>labels ${p.x}: recall ${String(p.recall)}</li>`)
    .join("");
  return [
    `<svg viewBox="0 0 ${w} ${h}" class="chart" data-points="${points.length}">`,
    `<polyline fill="none" stroke="currentColor" points="${coords}"/>`,
    points
      .map((p) => `<circle r="3" cx="${(p.x / maxX) * w}" cy="${h - (p.y / maxY) * h}"/>`)
      .join(""),
    `</svg>`,
    recall ? `<ul class="recall">${recall}</ul>` : "",
  ].join("");
}
