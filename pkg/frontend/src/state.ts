/**
 * View-model for the candidate list. At most five cards are ever shown and
 * a card holds exactly api id, name, description, and the selection flag --
 * signatures are not part of the model by construction.
 */

import type { Candidate } from "./api.js";

export const MAX_CARDS = 5;

export interface CandidateCard {
  apiId: string;
  name: string;
  description: string;
  selected: boolean;
}

export function toCards(candidates: Candidate[]): CandidateCard[] {
  return candidates.slice(0, MAX_CARDS).map((c) => ({
    apiId: c.api_id,
    name: c.name,
    description: c.description,
    selected: false,
  }));
}

export function toggleCard(cards: CandidateCard[], apiId: string): CandidateCard[] {
  return cards.map((card) =>
    card.apiId === apiId ? { ...card, selected: !card.selected } : card,
  );
}

export function selectedIds(cards: CandidateCard[]): string[] {
  return cards.filter((card) => card.selected).map((card) => card.apiId);
}

/** Submission needs one or more chosen APIs. */
export function canSubmit(cards: CandidateCard[]): boolean {
  return selectedIds(cards).length >= 1;
}

/** Re-apply a previously submitted selection, e.g. after a page reload. */
export function applySelection(cards: CandidateCard[], apiIds: string[]): CandidateCard[] {
  const chosen = new Set(apiIds);
  return cards.map((card) => ({ ...card, selected: chosen.has(card.apiId) }));
}
