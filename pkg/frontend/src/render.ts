/**
 * Pure HTML-string renderers; the DOM wiring in main.ts injects the output.
 * Keeping these as plain functions makes the "never renders a signature"
 * guarantee directly testable.
 */

import type { GenerateResult, ProblemSummary, VoteResult } from "./api.js";
import type { CandidateCard } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderProblem(problem: ProblemSummary): string {
  return [
    `<h2>${escapeHtml(problem.problem_id)} <small>${escapeHtml(problem.benchmark)}</small></h2>`,
    `<p class="description">${escapeHtml(problem.description)}</p>`,
    `<pre class="context">${escapeHtml(problem.context)}</pre>`,
  ].join("\n");
}

export function renderCards(cards: CandidateCard[]): string {
  const items = cards.map((card) => {
    const checked = card.selected ? " checked" : "";
    return [
      `<li class="card">`,
      `<label>`,
      `<input type="checkbox" data-api-id="${escapeHtml(card.apiId)}"${checked}>`,
      `<span class="name">${escapeHtml(card.name)}</span>`,
      `<span class="desc">${escapeHtml(card.description)}</span>`,
      `</label>`,
      `</li>`,
    ].join("");
  });
  return `<ul class="cards">${items.join("\n")}</ul>`;
}

export function renderVote(vote: VoteResult | null, notice = ""): string {
  if (!vote) {
    return `<p class="vote-empty">${escapeHtml(notice || "No selections yet.")}</p>`;
  }
  const items = vote.api_ids.map((id) => `<li>${escapeHtml(id)}</li>`).join("");
  return [
    `<p>${vote.voters} voter(s), majority threshold ${vote.threshold}:</p>`,
    `<ul class="vote">${items || "<li>(no API reached a majority)</li>"}</ul>`,
  ].join("\n");
}

export function renderVerdicts(result: GenerateResult): string {
  const chips = result.verdicts
    .map((v) => `<span class="verdict verdict-${escapeHtml(v)}">${escapeHtml(v)}</span>`)
    .join(" ");
  return [
    `<p>${result.c} of ${result.n} samples passed ` +
      `(pass@1 = ${result.pass_at_1.toFixed(4)}, temperature ${result.temperature}).</p>`,
    `<div class="verdicts">${chips}</div>`,
  ].join("\n");
}
