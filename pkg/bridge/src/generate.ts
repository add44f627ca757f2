/** Toy text-to-image stage: deterministic scene renderer with seeded defects.
 *
 * Instead of a diffusion model, images are flat renders of the structured
 * scene: each instance is a bordered rectangle whose fill encodes its color
 * and whose border encodes its category. A seeded corruption pass recolors,
 * drops, or duplicates instances so that a realistic fraction of images is
 * misaligned and the downstream revise/enforce loop has work to do.
 *
 * enforceGenerate replays the exact base render and applies parsed (c1, c2)
 * corrections scaled by w'; with w' = 0 the output is bitwise identical to
 * the base image.
 */

import type { BenchmarkEntry, SceneRelation } from "./formats.js";
import { parseClauses, type Clause } from "./enforce.js";
import { Raster } from "./image.js";
import {
  PALETTE,
  PALETTE_RGB,
  categoryBorder,
  type PaletteColor,
  type Rgb,
} from "./palette.js";
import { Rng } from "./rng.js";

export const CANVAS = 400;
export const BOX = 44;
const MARGIN = 18;
const SLOT = 60;
const EXTRA_ROW_Y = 340; // duplicates from corruption land below the scene grid

export interface Placement {
  category: string;
  categoryIndex: number;
  /** 0-based ordinal within the category; extras from corruption get -1. */
  instanceIndex: number;
  x: number;
  y: number;
  fill: Rgb;
}

/** Total order of instances along one axis, consistent with the relation
 * DAG for that axis (generator scenes are acyclic on both axes). Every
 * instance gets a distinct rank, so rendered boxes never overlap.
 */
function axisRanks(entry: BenchmarkEntry, axis: "horizontal" | "vertical"): number[] {
  const forward = axis === "horizontal" ? "left" : "above";
  const backward = axis === "horizontal" ? "right" : "below";
  const key = (ref: { category: string; index: number }) => `${ref.category}#${ref.index}`;
  const position = new Map(entry.instances.map((inst, i) => [key(inst), i]));
  const n = entry.instances.length;
  const successors: number[][] = Array.from({ length: n }, () => []);
  const inDegree = new Array<number>(n).fill(0);
  for (const rel of entry.relations) {
    const s = position.get(key(rel.subject))!;
    const o = position.get(key(rel.object))!;
    if (rel.kind === forward) {
      successors[s]!.push(o);
      inDegree[o]!++;
    } else if (rel.kind === backward) {
      successors[o]!.push(s);
      inDegree[s]!++;
    }
  }
  const ranks = new Array<number>(n).fill(0);
  const remaining = new Set(Array.from({ length: n }, (_, i) => i));
  for (let rank = 0; rank < n; rank++) {
    const next = [...remaining].find((i) => inDegree[i] === 0);
    if (next === undefined) throw new Error("relation cycle in benchmark entry");
    ranks[next] = rank;
    remaining.delete(next);
    for (const succ of successors[next]!) inDegree[succ]!--;
  }
  return ranks;
}

export function basePlacements(entry: BenchmarkEntry): Placement[] {
  const xRanks = axisRanks(entry, "horizontal");
  const yRanks = axisRanks(entry, "vertical");
  const categories = [...new Set(entry.instances.map((inst) => inst.category))];
  return entry.instances.map((inst, i) => ({
    category: inst.category,
    categoryIndex: categories.indexOf(inst.category),
    instanceIndex: inst.index,
    x: MARGIN + xRanks[i]! * SLOT,
    y: MARGIN + yRanks[i]! * SLOT,
    fill: PALETTE_RGB[inst.color ?? "white"],
  }));
}

/** Seeded defects: recolor, drop, or duplicate one instance. */
export function corrupt(placements: Placement[], rng: Rng): Placement[] {
  const out = placements.map((p) => ({ ...p }));
  if (out.length === 0) return out;
  const roll = rng.next();
  const victim = rng.int(out.length);
  if (roll < 0.25) {
    const current = out[victim]!;
    const others = PALETTE.filter((c) => PALETTE_RGB[c] !== current.fill);
    current.fill = PALETTE_RGB[rng.pick(others)];
  } else if (roll < 0.4) {
    out.splice(victim, 1);
  } else if (roll < 0.55) {
    const twin = { ...out[victim]!, instanceIndex: -1 };
    twin.x = MARGIN + rng.int(5) * SLOT;
    twin.y = EXTRA_ROW_Y;
    out.push(twin);
  }
  return out;
}

export function render(placements: Placement[]): Raster {
  const raster = new Raster(CANVAS, CANVAS);
  for (const p of placements) {
    raster.fillRect(p.x, p.y, BOX, BOX, p.fill);
    raster.strokeRect(p.x, p.y, BOX, BOX, categoryBorder(p.categoryIndex));
  }
  return raster;
}

export function generateImage(entry: BenchmarkEntry): Raster {
  const rng = new Rng(entry.seed);
  return render(corrupt(basePlacements(entry), rng));
}

function lerp(a: number, b: number, t: number): number {
  return Math.round(a + (b - a) * t);
}

function lerpRgb(a: Rgb, b: Rgb, t: number): Rgb {
  return [lerp(a[0], b[0], t), lerp(a[1], b[1], t), lerp(a[2], b[2], t)];
}

function findPlacement(
  placements: Placement[],
  category: string,
  index: number,
): Placement | undefined {
  return placements.find((p) => p.category === category && p.instanceIndex === index);
}

function applyClause(
  placements: Placement[],
  clause: Clause,
  entry: BenchmarkEntry,
  strength: number,
): void {
  if (clause.type === "count") {
    const current = placements.filter((p) => p.category === clause.category);
    if (strength < 0.5) return; // structural edits only engage at half strength
    if (current.length > clause.n) {
      // Remove extras, preferring corruption-added duplicates.
      const removable = [...current].sort((a, b) => a.instanceIndex - b.instanceIndex);
      for (const extra of removable.slice(0, current.length - clause.n)) {
        placements.splice(placements.indexOf(extra), 1);
      }
    } else {
      // Re-add the prompt instances that are missing.
      for (const inst of entry.instances) {
        if (inst.category !== clause.category) continue;
        if (findPlacement(placements, inst.category, inst.index)) continue;
        if (placements.filter((p) => p.category === clause.category).length >= clause.n) break;
        const base = findPlacement(basePlacements(entry), inst.category, inst.index)!;
        placements.push({ ...base, fill: PALETTE_RGB[colorOf(entry, inst.category, inst.index)] });
      }
    }
  } else if (clause.type === "color") {
    if (clause.negated) return; // c2 describes current state; only c1 moves pixels
    const target = findPlacement(placements, clause.category, clause.index);
    if (target) target.fill = lerpRgb(target.fill, PALETTE_RGB[clause.color], strength);
  } else {
    if (clause.negated) return;
    const subject = findPlacement(placements, clause.subject.category, clause.subject.index);
    const object = findPlacement(placements, clause.object.category, clause.object.index);
    if (!subject || !object) return;
    const goal = relationGoal(subject, object, clause.kind);
    subject.x = lerp(subject.x, goal.x, strength);
    subject.y = lerp(subject.y, goal.y, strength);
  }
}

function colorOf(entry: BenchmarkEntry, category: string, index: number): PaletteColor {
  const inst = entry.instances.find((i) => i.category === category && i.index === index);
  return inst?.color ?? "white";
}

function relationGoal(
  subject: Placement,
  object: Placement,
  kind: SceneRelation["kind"],
): { x: number; y: number } {
  const gap = BOX + 14; // comfortably past the 0.1·(w1+w2) offset threshold
  switch (kind) {
    case "left":
      return { x: Math.max(0, object.x - gap), y: subject.y };
    case "right":
      return { x: Math.min(CANVAS - BOX, object.x + gap), y: subject.y };
    case "above":
      return { x: subject.x, y: Math.max(0, object.y - gap) };
    case "below":
      return { x: subject.x, y: Math.min(CANVAS - BOX, object.y + gap) };
  }
}

export function enforceGenerate(
  entry: BenchmarkEntry,
  c1: string,
  c2: string,
  wPrime: number,
): Raster {
  if (wPrime < 0) throw new Error(`w' must be >= 0, got ${wPrime}`);
  const rng = new Rng(entry.seed);
  const placements = corrupt(basePlacements(entry), rng);
  const strength = Math.min(1, wPrime);
  parseClauses(c2); // validated for well-formedness; current state is implicit
  for (const clause of parseClauses(c1)) {
    applyClause(placements, clause, entry, strength);
  }
  return render(placements);
}
