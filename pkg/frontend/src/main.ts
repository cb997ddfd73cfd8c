/**
 * Single-page wiring: problem picker, candidate multi-select, submit,
 * vote view (refreshed by polling every 2s), and the generate action.
 * The server is the source of truth; no optimistic updates.
 */

import { ApiError, ServiceClient, type ProblemSummary } from "./api.js";
import {
  applySelection,
  canSubmit,
  selectedIds,
  toCards,
  toggleCard,
  type CandidateCard,
} from "./state.js";
import { renderCards, renderProblem, renderVerdicts, renderVote } from "./render.js";

const POLL_INTERVAL_MS = 2000;

const client = new ServiceClient("");

let problems: ProblemSummary[] = [];
let currentProblem: ProblemSummary | null = null;
let cards: CandidateCard[] = [];
let pollTimer: number | undefined;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function sessionUserId(): string {
  let userId = localStorage.getItem("privapi-user-id") ?? "";
  while (!userId) {
    userId = (window.prompt("Enter a user id for this session:") ?? "").trim();
  }
  localStorage.setItem("privapi-user-id", userId);
  return userId;
}

function showBanner(message: string) {
  const banner = el<HTMLDivElement>("banner");
  banner.textContent = message;
  banner.hidden = !message;
}

function refreshSubmitButton() {
  el<HTMLButtonElement>("submit").disabled = !canSubmit(cards);
}

function paintCards() {
  el<HTMLDivElement>("candidates").innerHTML = renderCards(cards);
  for (const box of document.querySelectorAll<HTMLInputElement>("input[data-api-id]")) {
    box.addEventListener("change", () => {
      cards = toggleCard(cards, box.dataset.apiId ?? "");
      refreshSubmitButton();
    });
  }
  refreshSubmitButton();
}

async function refreshVote() {
  if (!currentProblem) return;
  const voteView = el<HTMLDivElement>("vote");
  try {
    const vote = await client.vote(currentProblem.problem_id);
    voteView.innerHTML = renderVote(vote);
  } catch (error) {
    if (error instanceof ApiError && error.status === 409) {
      voteView.innerHTML = renderVote(null, "No selections yet.");
    } else {
      showBanner(`Vote refresh failed: ${String(error)} — retrying…`);
    }
  }
}

// The service reveals only the aggregated vote (voting stays blind), so the
// user's own submitted choice is remembered locally to survive reloads.
function selectionKey(problemId: string): string {
  return `privapi-selection:${sessionUserId()}:${problemId}`;
}

function rememberSelection(problemId: string, apiIds: string[]) {
  localStorage.setItem(selectionKey(problemId), JSON.stringify(apiIds));
}

function recallSelection(problemId: string): string[] {
  try {
    return JSON.parse(localStorage.getItem(selectionKey(problemId)) ?? "[]");
  } catch {
    return [];
  }
}

async function selectProblem(problemId: string) {
  currentProblem = problems.find((p) => p.problem_id === problemId) ?? null;
  if (!currentProblem) return;
  showBanner("");
  el<HTMLDivElement>("problem").innerHTML = renderProblem(currentProblem);
  el<HTMLDivElement>("result").innerHTML = "";
  try {
    cards = toCards(await client.candidates(currentProblem.problem_id));
    cards = applySelection(cards, recallSelection(currentProblem.problem_id));
  } catch (error) {
    showBanner(`Could not load candidates: ${String(error)}`);
    cards = [];
  }
  paintCards();
  await refreshVote();
  if (pollTimer !== undefined) window.clearInterval(pollTimer);
  pollTimer = window.setInterval(refreshVote, POLL_INTERVAL_MS);
}

async function submitSelection() {
  if (!currentProblem) return;
  try {
    const chosen = selectedIds(cards);
    const ack = await client.submitSelection(
      currentProblem.problem_id,
      sessionUserId(),
      chosen,
    );
    rememberSelection(currentProblem.problem_id, chosen);
    showBanner(`Selection saved (${ack.voters} voter(s) so far).`);
    await refreshVote();
  } catch (error) {
    if (error instanceof ApiError) {
      showBanner(`Selection rejected (${error.status}): ${error.message}`);
    } else {
      showBanner(`Network failure: ${String(error)} — please retry.`);
    }
  }
}

async function runGenerate() {
  if (!currentProblem) return;
  const button = el<HTMLButtonElement>("generate");
  const result = el<HTMLDivElement>("result");
  button.disabled = true;
  result.textContent = "Generating…";
  try {
    const summary = await client.generate(currentProblem.problem_id);
    result.innerHTML = renderVerdicts(summary);
  } catch (error) {
    if (error instanceof ApiError) {
      result.textContent = `Generation refused (${error.status}): ${error.message}`;
    } else {
      result.textContent = `Network failure: ${String(error)}`;
    }
  } finally {
    button.disabled = false;
  }
}

async function boot() {
  sessionUserId();
  try {
    problems = await client.listProblems();
  } catch (error) {
    showBanner(`Cannot reach the service: ${String(error)} — retrying in 2s`);
    window.setTimeout(boot, POLL_INTERVAL_MS);
    return;
  }
  const picker = el<HTMLSelectElement>("picker");
  picker.innerHTML = problems
    .map(
      (p) =>
        `<option value="${p.problem_id}">${p.problem_id} — ${p.description}</option>`,
    )
    .join("");
  picker.addEventListener("change", () => void selectProblem(picker.value));
  el<HTMLButtonElement>("submit").addEventListener("click", () => void submitSelection());
  el<HTMLButtonElement>("generate").addEventListener("click", () => void runGenerate());
  if (problems.length) await selectProblem(problems[0].problem_id);
}

document.addEventListener("DOMContentLoaded", () => void boot());
