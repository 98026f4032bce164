// Canned wire documents and a scripted fetch for exercising the client and
// controller without a live service.

import { FetchLike } from "../src/client";
import { Candidate, PathEvent, SessionState } from "../src/types";

export function makeCandidates(scores: number[], lambda = 1.0): Candidate[] {
  const best = Math.max(...scores);
  return scores.map((score, i) => ({
    group: i + 1,
    score,
    in_A_lambda: score >= lambda * best * (1 - 1e-9),
  }));
}

export function makeState(overrides: Partial<SessionState> = {}): SessionState {
  const base: SessionState = {
    id: "abc123",
    phase: "awaiting_pick",
    iteration: 0,
    active_groups: [],
    Q: 1.75,
    Q_initial: 1.75,
    events: [],
    config: {
      lambda: 1.0,
      scoring_mode: "objective_reduction",
      k_max: 5,
      delta_floor: 1.75e-10,
      tie_tolerance: 1e-9,
      backward: true,
    },
    family: "gaussian",
    created: 1700000000.0,
    updated: 1700000000.0,
    candidates: makeCandidates([1.5, 0.9, 0.4, 0.2, 0.1]),
  };
  const state = { ...base, ...overrides };
  if (state.phase !== "awaiting_pick") delete state.candidates;
  return state;
}

export function addEvent(group: number, iteration: number, Q: number): PathEvent {
  return { action: "add", group, Q_after: Q, level_gain: 0.5, iteration };
}

export function removeEvent(group: number, iteration: number, Q: number): PathEvent {
  return { action: "remove", group, Q_after: Q, level_gain: 0.5, iteration };
}

export interface Call {
  method: string;
  path: string;
  body: unknown;
}

export type Route = (call: Call) => { status: number; body: unknown };

/** Scripted server: one handler per "METHOD path", recording every call. */
export function scriptedFetch(routes: Record<string, Route>): {
  fetch: FetchLike;
  calls: Call[];
} {
  const calls: Call[] = [];
  const fetchImpl: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const call: Call = {
      method,
      path,
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    };
    calls.push(call);
    const route = routes[`${method} ${path}`];
    if (!route) {
      return new Response(JSON.stringify({ detail: `no route ${method} ${path}` }), {
        status: 404,
      });
    }
    const { status, body } = route(call);
    return new Response(JSON.stringify(body), { status });
  };
  return { fetch: fetchImpl, calls };
}
