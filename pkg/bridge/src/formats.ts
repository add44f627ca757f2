/** Readers and writers for the core pipeline's JSON Lines file formats.
 *
 * The bridge talks to the scorer exclusively through these files: it consumes
 * benchmark and enforce-pair files and emits detection record files.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { PALETTE, type PaletteColor } from "./palette.js";

export const BENCH_SCHEMA = "scenebench/bench/1";
export const DETECTION_SCHEMA = "scenebench/detections/1";
export const ENFORCE_SCHEMA = "scenebench/enforce/1";

export type RelationKind = "left" | "right" | "above" | "below";
const RELATION_KINDS = new Set(["left", "right", "above", "below"]);

export interface InstanceRef {
  category: string;
  /** 0-based index within the category, matching the file format. */
  index: number;
}

export interface SceneInstance extends InstanceRef {
  color: PaletteColor | null;
}

export interface SceneRelation {
  subject: InstanceRef;
  object: InstanceRef;
  kind: RelationKind;
}

export interface BenchmarkEntry {
  id: number;
  seed: bigint;
  totalNumber: number;
  instances: SceneInstance[];
  relations: SceneRelation[];
  prompt: string;
}

export interface RawDetection {
  category: string;
  confidence: number;
  /** [cx, cy, w, h] in pixels. */
  box: [number, number, number, number];
  colorScores: Record<PaletteColor, number>;
}

export interface EnforcePair {
  id: number;
  c1: string;
  c2: string;
  seed: bigint;
}

function parseLines(path: string, schema: string): Array<Record<string, unknown>> {
  const lines = readFileSync(path, "utf-8")
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
  if (lines.length === 0) throw new Error(`${path}: empty file`);
  // Seeds can exceed Number.MAX_SAFE_INTEGER; snapshot them before the lossy
  // JSON.parse and restore as BigInt afterwards.
  const records = lines.map((line, i) => {
    const seedMatch = /"seed":\s*(\d+)/.exec(line);
    let parsed: Record<string, unknown>;
    try {
      parsed = JSON.parse(line) as Record<string, unknown>;
    } catch (error) {
      throw new Error(`${path}:${i + 1}: invalid JSON (${String(error)})`);
    }
    if (seedMatch) parsed["seed"] = BigInt(seedMatch[1]!);
    return parsed;
  });
  if (records[0]?.["schema"] !== schema) {
    throw new Error(`${path}:1: expected header with schema "${schema}"`);
  }
  return records.slice(1);
}

function asColor(value: unknown, context: string): PaletteColor | null {
  if (value === null) return null;
  if (typeof value === "string" && (PALETTE as readonly string[]).includes(value)) {
    return value as PaletteColor;
  }
  throw new Error(`${context}: unknown color ${JSON.stringify(value)}`);
}

export function readBenchmark(path: string): BenchmarkEntry[] {
  return parseLines(path, BENCH_SCHEMA).map((record, i) => {
    const context = `${path}:${i + 2}`;
    const instances: SceneInstance[] = [];
    const relations: SceneRelation[] = [];
    const blocks = record["categories"];
    if (!Array.isArray(blocks)) throw new Error(`${context}: missing categories`);
    for (const block of blocks as Array<Record<string, unknown>>) {
      const category = String(block["category"]);
      for (const inst of block["instances"] as Array<Record<string, unknown>>) {
        const index = Number(inst["id"]);
        instances.push({ category, index, color: asColor(inst["color"], context) });
        for (const rel of (inst["relations"] as Array<Record<string, unknown>>) ?? []) {
          const kind = String(rel["kind"]);
          if (!RELATION_KINDS.has(kind)) throw new Error(`${context}: bad relation kind ${kind}`);
          relations.push({
            subject: { category, index },
            object: { category: String(rel["category"]), index: Number(rel["id"]) },
            kind: kind as RelationKind,
          });
        }
      }
    }
    if (instances.length !== Number(record["total_number"])) {
      throw new Error(`${context}: total_number disagrees with instance list`);
    }
    return {
      id: Number(record["id"]),
      seed: record["seed"] as bigint,
      totalNumber: instances.length,
      instances,
      relations,
      prompt: String(record["prompt"]),
    };
  });
}

export function readEnforcePairs(path: string): EnforcePair[] {
  return parseLines(path, ENFORCE_SCHEMA).map((record) => ({
    id: Number(record["id"]),
    c1: String(record["c1"]),
    c2: String(record["c2"]),
    seed: record["seed"] as bigint,
  }));
}

export function writeDetections(path: string, imageId: number, detections: RawDetection[]): void {
  const lines = [JSON.stringify({ schema: DETECTION_SCHEMA, image_id: imageId })];
  for (const d of detections) {
    lines.push(
      JSON.stringify({
        category: d.category,
        confidence: d.confidence,
        box: d.box,
        color_scores: d.colorScores,
      }),
    );
  }
  writeFileSync(path, lines.join("\n") + "\n", "utf-8");
}
