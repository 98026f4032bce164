// Pure projection of server state into what the console draws.  No requests,
// no mutation: the same state and editor inputs always give the same view.

import { SessionState } from "./types.js";

export interface CandidateRow {
  group: number;
  score: number;
  ratio: number; // score / best score this iteration
  eligible: boolean; // server's candidate-set flag
  pickable: boolean; // eligible and the session is awaiting a pick
  priority: boolean; // member of the operator's priority list
}

export interface TimelineEntry {
  label: string; // signed notation: "3" for an add, "-3" for a removal
  kind: "add" | "remove";
  group: number;
  iteration: number;
}

export interface QPoint {
  step: number; // 0 is the empty model
  Q: number;
}

export interface ConsoleView {
  sessionId: string;
  phase: SessionState["phase"];
  iteration: number;
  activeGroups: number[];
  lambda: number;
  priorityList: number[];
  candidateTable: CandidateRow[];
  timeline: TimelineEntry[];
  qCurve: QPoint[];
  finishReason?: string;
}

export function signedLabel(action: "add" | "remove", group: number): string {
  return action === "add" ? String(group) : `-${group}`;
}

export function renderState(state: SessionState, priorityList: number[] = []): ConsoleView {
  const wanted = new Set(priorityList);
  const candidates = state.candidates ?? [];
  const best = candidates.length ? Math.max(...candidates.map((c) => c.score)) : 0;
  const table: CandidateRow[] = candidates
    .map((c) => ({
      group: c.group,
      score: c.score,
      ratio: best > 0 ? c.score / best : 0,
      eligible: c.in_A_lambda,
      pickable: c.in_A_lambda && state.phase === "awaiting_pick",
      priority: wanted.has(c.group),
    }))
    .sort((a, b) => b.score - a.score || a.group - b.group);

  const timeline: TimelineEntry[] = state.events.map((e) => ({
    label: signedLabel(e.action, e.group),
    kind: e.action,
    group: e.group,
    iteration: e.iteration,
  }));

  const qCurve: QPoint[] = [{ step: 0, Q: state.Q_initial }];
  state.events.forEach((e, i) => qCurve.push({ step: i + 1, Q: e.Q_after }));

  return {
    sessionId: state.id,
    phase: state.phase,
    iteration: state.iteration,
    activeGroups: [...state.active_groups],
    lambda: state.config.lambda,
    priorityList: [...priorityList],
    candidateTable: table,
    timeline,
    qCurve,
    finishReason: state.finish_reason,
  };
}

/** Parse the priority-list editor ("3, 1  5") into unique one-based ids. */
export function parsePriorityList(text: string): number[] {
  const out: number[] = [];
  for (const piece of text.split(/[\s,]+/)) {
    if (!piece) continue;
    const id = Number(piece);
    if (!Number.isInteger(id) || id < 1) {
      throw new Error(`priority entries are one-based group ids, got "${piece}"`);
    }
    if (!out.includes(id)) out.push(id);
  }
  return out;
}
