/** End-to-end revise-then-enforce smoke test.
 *
 * Drives the full loop on the 20-prompt fixture: render → detect → (core)
 * score → (core) revise → enforce-render → detect → score. The scoring and
 * revision steps shell out to the core CLI and are skipped when it is not
 * installed; everything else runs in-process.
 */

import { execFileSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync, readdirSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { runDetect, runGenerate } from "../src/cli.js";

const FIXTURE = new URL("../fixtures/bench20.jsonl", import.meta.url).pathname;

function coreAvailable(): boolean {
  try {
    execFileSync("python3", ["-c", "import scenebench"], { stdio: "ignore" });
    return true;
  } catch {
    return false;
  }
}

function core(args: string[]): string {
  return execFileSync("python3", ["-m", "scenebench.cli", ...args], { encoding: "utf-8" });
}

function lastJsonLine(text: string): Record<string, number> {
  const lines = text.trim().split("\n");
  return JSON.parse(lines[lines.length - 1]!);
}

describe("pipeline smoke", () => {
  it("renders and detects the whole fixture with schema-valid records", () => {
    const work = mkdtempSync(join(tmpdir(), "bridge-smoke-"));
    const images = join(work, "images");
    const records = join(work, "detections");
    expect(runGenerate(FIXTURE, images)).toBe(20);
    expect(readdirSync(images).filter((f) => f.endsWith(".ppm"))).toHaveLength(20);

    expect(runDetect(FIXTURE, images, records)).toBe(20);
    for (const name of readdirSync(records)) {
      const lines = readFileSync(join(records, name), "utf-8").trim().split("\n");
      const header = JSON.parse(lines[0]!);
      expect(header.schema).toBe("scenebench/detections/1");
      expect(typeof header.image_id).toBe("number");
    }
  });

  it("completes a revise-then-enforce pass against the core scorer", (ctx) => {
    if (!coreAvailable()) {
      ctx.skip();
      return;
    }
    const work = mkdtempSync(join(tmpdir(), "bridge-rte-"));
    const images = join(work, "images");
    const records = join(work, "detections");
    runGenerate(FIXTURE, images);
    runDetect(FIXTURE, images, records);

    const scorePath = join(work, "score.jsonl");
    const before = lastJsonLine(
      core(["score", "--benchmark", FIXTURE, "--detections", records, "-o", scorePath]),
    );
    expect(before.mean_acc).toBeGreaterThanOrEqual(0);
    expect(before.align_score).toBeLessThanOrEqual(1);

    const enforcePath = join(work, "enforce.jsonl");
    core(["revise", "--report", scorePath, "--benchmark", FIXTURE, "-o", enforcePath]);
    expect(existsSync(enforcePath)).toBe(true);

    // w' = 0 keeps every image bitwise identical to its base render.
    const zeroImages = join(work, "images-zero");
    runGenerate(FIXTURE, zeroImages, enforcePath, 0);
    for (const name of readdirSync(images)) {
      const a = readFileSync(join(images, name));
      const b = readFileSync(join(zeroImages, name));
      expect(a.equals(b), `w'=0 changed ${name}`).toBe(true);
    }

    const enforcedImages = join(work, "images-enforced");
    const enforcedRecords = join(work, "detections-enforced");
    runGenerate(FIXTURE, enforcedImages, enforcePath, 1.0);
    runDetect(FIXTURE, enforcedImages, enforcedRecords);
    const afterPath = join(work, "score-enforced.jsonl");
    const after = lastJsonLine(
      core(["score", "--benchmark", FIXTURE, "--detections", enforcedRecords, "-o", afterPath]),
    );
    // Direction is logged, not asserted: improvement is expected but not a
    // guarantee of the toy pipeline.
    console.log(
      `combined score before ${before.align_score?.toFixed(4)} → ` +
        `after ${after.align_score?.toFixed(4)}`,
    );
    expect(after.align_score).toBeGreaterThan(0);
    expect(after.align_score).toBeLessThanOrEqual(1);
  }, 120_000);
});
