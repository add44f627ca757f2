/** Bridge CLI.
 *
 *   generate --benchmark bench.jsonl --outdir images/ [--enforce pairs.jsonl --wprime 1.0]
 *   detect   --benchmark bench.jsonl --images images/ --outdir detections/
 *
 * Images are binary PPM files named `<id>_<seed>.ppm`; detection records are
 * `<id>.json` files in the core's detection format.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { detectImage } from "./detect.js";
import {
  readBenchmark,
  readEnforcePairs,
  writeDetections,
  type BenchmarkEntry,
} from "./formats.js";
import { enforceGenerate, generateImage } from "./generate.js";
import { Raster } from "./image.js";

export function imageName(entry: BenchmarkEntry): string {
  return `${entry.id}_${entry.seed}.ppm`;
}

export function entryCategories(entry: BenchmarkEntry): string[] {
  return [...new Set(entry.instances.map((inst) => inst.category))];
}

export function runGenerate(
  benchmark: string,
  outdir: string,
  enforce?: string,
  wPrime = 1.0,
): number {
  const entries = readBenchmark(benchmark);
  const pairs = enforce
    ? new Map(readEnforcePairs(enforce).map((p) => [p.id, p]))
    : new Map<number, { c1: string; c2: string }>();
  mkdirSync(outdir, { recursive: true });
  for (const entry of entries) {
    const pair = pairs.get(entry.id);
    const raster = pair
      ? enforceGenerate(entry, pair.c1, pair.c2, wPrime)
      : generateImage(entry);
    writeFileSync(join(outdir, imageName(entry)), raster.toPpm());
  }
  return entries.length;
}

export function runDetect(benchmark: string, images: string, outdir: string): number {
  const entries = readBenchmark(benchmark);
  mkdirSync(outdir, { recursive: true });
  for (const entry of entries) {
    const raster = Raster.fromPpm(readFileSync(join(images, imageName(entry))));
    const detections = detectImage(raster, entryCategories(entry));
    writeDetections(join(outdir, `${entry.id}.json`), entry.id, detections);
  }
  return entries.length;
}

function main(): void {
  yargs(hideBin(process.argv))
    .command(
      "generate",
      "Render one image per benchmark entry",
      (y) =>
        y
          .option("benchmark", { type: "string", demandOption: true })
          .option("outdir", { type: "string", demandOption: true })
          .option("enforce", { type: "string" })
          .option("wprime", { type: "number", default: 1.0 }),
      (argv) => {
        const n = runGenerate(argv.benchmark, argv.outdir, argv.enforce, argv.wprime);
        console.log(`rendered ${n} images to ${argv.outdir}`);
      },
    )
    .command(
      "detect",
      "Emit detection records for rendered images",
      (y) =>
        y
          .option("benchmark", { type: "string", demandOption: true })
          .option("images", { type: "string", demandOption: true })
          .option("outdir", { type: "string", demandOption: true }),
      (argv) => {
        const n = runDetect(argv.benchmark, argv.images, argv.outdir);
        console.log(`wrote ${n} detection records to ${argv.outdir}`);
      },
    )
    .demandCommand(1)
    .strict()
    .parseSync();
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) main();
