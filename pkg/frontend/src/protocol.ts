/**
 * Wire types shared with the engine.
 *
 * The viewer only ever talks to the engine through these JSON shapes:
 * scene files, the baked navmesh export, per-step frame reports, and the
 * input items submitted with each step. Everything is validated at the
 * boundary so a drifting engine build fails loudly instead of rendering
 * garbage.
 */

import { z } from "zod";

const vec3 = z.tuple([z.number(), z.number(), z.number()]);

export const GameEventSchema = z.object({
  name: z.string(),
  payload: z.record(z.string(), z.unknown()).default({}),
});

export const FrameReportSchema = z.object({
  step: z.number().int().nonnegative(),
  t: z.number(),
  dt: z.number(),
  events: z.array(GameEventSchema),
  state: z.array(z.string()),
  state_changed: z.boolean(),
  player: vec3.nullable(),
  yaw: z.number(),
  clock: z.object({ remaining: z.number(), display: z.string() }).nullable(),
  updates: z.record(z.string(), z.string()),
  visibility: z.record(z.string(), z.boolean()),
  blockers: z.record(z.string(), z.boolean()),
  errors: z.array(z.string()),
});

export const NavmeshExportSchema = z.object({
  version: z.literal(1),
  vertices: z.array(vec3),
  polygons: z.array(z.array(z.number().int().nonnegative())),
  adjacency: z.array(z.tuple([z.number().int(), z.number().int(), z.number().int()])),
  regions: z.array(z.number().int()),
  blockers: z.record(z.string(), z.array(z.number().int())),
});

export const ValidateReportSchema = z.object({
  ok: z.boolean(),
  scene: z.string(),
  problems: z.array(z.string()),
  rooms: z.array(z.string()),
  puzzles: z.array(z.string()),
  navmesh: z
    .object({
      polygons: z.number().int(),
      area: z.number(),
      blockers: z.array(z.string()),
    })
    .nullable(),
  panels: z.array(z.string()),
  clock: z.number().nullable(),
  solvable: z.boolean().nullable(),
  witness: z.object({ actions: z.array(z.record(z.string(), z.unknown())) }).nullable(),
});

/** One step's worth of player intent, in the engine's input grammar. */
export type EngineInput =
  | { move: [number, number] | [number, number, number] }
  | { emit: string; payload?: Record<string, unknown> }
  | {
      pointer: {
        origin: [number, number, number];
        direction: [number, number, number];
        action?: "click" | "hover";
      };
    };

export type FrameReport = z.infer<typeof FrameReportSchema>;
export type GameEvent = z.infer<typeof GameEventSchema>;
export type NavmeshExport = z.infer<typeof NavmeshExportSchema>;
export type ValidateReport = z.infer<typeof ValidateReportSchema>;

export function parseFrameReport(data: unknown): FrameReport {
  return FrameReportSchema.parse(data);
}

export function parseNavmeshExport(data: unknown): NavmeshExport {
  return NavmeshExportSchema.parse(data);
}

export function parseValidateReport(data: unknown): ValidateReport {
  return ValidateReportSchema.parse(data);
}
