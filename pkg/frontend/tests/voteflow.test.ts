/**
 * Three simulated users drive the selection endpoints through the client;
 * the fake service implements the same contract as the real one (per-user
 * last-write-wins selections, strict-majority vote, 422 for non-candidate
 * ids, 409 before any selection).
 */

import { describe, expect, it } from "vitest";

import { ApiError, ServiceClient } from "../src/api.js";
import { selectedIds, toCards, toggleCard } from "../src/state.js";

const CANDIDATE_IDS = ["m.f0", "m.f1", "m.f2", "m.f3", "m.f4"];

function fakeService() {
  const selections = new Map<string, string[]>();

  const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
    const json = (status: number, payload: unknown) =>
      new Response(JSON.stringify(payload), {
        status,
        headers: { "Content-Type": "application/json" },
      });

    if (url.endsWith("/candidates?k=5")) {
      return json(200, {
        problem_id: "p1",
        candidates: CANDIDATE_IDS.map((id, i) => ({
          api_id: id,
          name: `f${i}`,
          description: `candidate ${i}`,
        })),
      });
    }
    if (url.endsWith("/selections") && init?.method === "POST") {
      const body = JSON.parse(String(init.body));
      const bad = body.api_ids.filter((id: string) => !CANDIDATE_IDS.includes(id));
      if (bad.length) return json(422, { detail: `api_ids outside the candidate list: ${bad}` });
      selections.set(body.user_id, body.api_ids);
      return json(200, { ok: true, voters: selections.size });
    }
    if (url.endsWith("/vote")) {
      if (selections.size === 0) return json(409, { detail: "no selections recorded" });
      const threshold = Math.floor(selections.size / 2) + 1;
      const counts = new Map<string, number>();
      for (const ids of selections.values()) {
        for (const id of new Set(ids)) counts.set(id, (counts.get(id) ?? 0) + 1);
      }
      const winners = CANDIDATE_IDS.filter((id) => (counts.get(id) ?? 0) >= threshold);
      return json(200, {
        problem_id: "p1",
        api_ids: winners,
        voters: selections.size,
        threshold,
      });
    }
    return json(404, { detail: `unexpected ${url}` });
  };

  return new ServiceClient("", fetchFn);
}

describe("three-user vote flow", () => {
  it("produces the strict-majority set", async () => {
    const client = fakeService();
    const candidates = await client.candidates("p1");
    expect(candidates).toHaveLength(5);

    // volunteer 1 picks f0 + f2, volunteer 2 picks f0, volunteer 3 picks f2 + f4
    const picks: Record<string, string[]> = {
      volunteer1: ["m.f0", "m.f2"],
      volunteer2: ["m.f0"],
      volunteer3: ["m.f2", "m.f4"],
    };
    for (const [user, ids] of Object.entries(picks)) {
      let cards = toCards(candidates);
      for (const id of ids) cards = toggleCard(cards, id);
      const ack = await client.submitSelection("p1", user, selectedIds(cards));
      expect(ack.ok).toBe(true);
    }

    const vote = await client.vote("p1");
    expect(vote.voters).toBe(3);
    expect(vote.threshold).toBe(2);
    expect(vote.api_ids).toEqual(["m.f0", "m.f2"]); // each chosen by 2 of 3
  });

  it("vote before any submission surfaces the 409 state", async () => {
    const client = fakeService();
    const error = await client.vote("p1").catch((e) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect(error.status).toBe(409);
  });

  it("selections outside the candidate list are rejected with 422", async () => {
    const client = fakeService();
    await client.candidates("p1");
    const error = await client
      .submitSelection("p1", "volunteer1", ["m.f0", "not.a.candidate"])
      .catch((e) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect(error.status).toBe(422);
  });

  it("resubmitting replaces the user's earlier choice", async () => {
    const client = fakeService();
    await client.submitSelection("p1", "u1", ["m.f0"]);
    await client.submitSelection("p1", "u1", ["m.f1"]);
    await client.submitSelection("p1", "u2", ["m.f1"]);
    await client.submitSelection("p1", "u3", ["m.f1"]);
    const vote = await client.vote("p1");
    expect(vote.api_ids).toEqual(["m.f1"]);
  });
});
