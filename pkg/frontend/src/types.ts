// Wire contract of the session service.  Parsed, never trusted: a malformed
// payload is turned into a typed error the console can show as a banner.

import { z } from "zod";

export const candidateSchema = z.object({
  group: z.number().int().min(1),
  score: z.number(),
  in_A_lambda: z.boolean(),
});

export const pathEventSchema = z.object({
  action: z.enum(["add", "remove"]),
  group: z.number().int().min(1),
  Q_after: z.number(),
  level_gain: z.number(),
  iteration: z.number().int().min(1),
});

export const sessionStateSchema = z.object({
  id: z.string().min(1),
  phase: z.enum(["awaiting_pick", "running", "finished"]),
  iteration: z.number().int().min(0),
  active_groups: z.array(z.number().int().min(1)),
  Q: z.number(),
  Q_initial: z.number(),
  events: z.array(pathEventSchema),
  config: z.object({
    lambda: z.number(),
    scoring_mode: z.string(),
    k_max: z.number().int(),
    delta_floor: z.number(),
    tie_tolerance: z.number(),
    backward: z.boolean(),
  }),
  family: z.string(),
  created: z.number(),
  updated: z.number(),
  finish_reason: z.string().optional(),
  candidates: z.array(candidateSchema).optional(),
});

export const finishDocSchema = z.object({
  state: sessionStateSchema,
  model: z.object({
    family: z.string(),
    coefficients: z.array(z.number()),
    active_groups: z.array(z.number().int().min(1)),
    Q: z.number(),
  }),
  path: z.object({
    events: z.array(pathEventSchema),
    Q_initial: z.number(),
    finish_reason: z.string().nullable(),
  }).passthrough(),
});

export type Candidate = z.infer<typeof candidateSchema>;
export type PathEvent = z.infer<typeof pathEventSchema>;
export type SessionState = z.infer<typeof sessionStateSchema>;
export type FinishDoc = z.infer<typeof finishDocSchema>;

export function parseSessionState(payload: unknown): SessionState {
  const state = sessionStateSchema.parse(payload);
  // candidate list present exactly while a pick is awaited
  if (state.phase === "awaiting_pick" && !state.candidates) {
    throw new Error("awaiting_pick state without a candidate list");
  }
  if (state.phase !== "awaiting_pick" && state.candidates) {
    throw new Error(`candidate list present in phase ${state.phase}`);
  }
  return state;
}
