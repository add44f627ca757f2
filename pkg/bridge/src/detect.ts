/** Toy detector: finds bordered rectangles by connected components and emits
 * raw detection records in the core's format.
 *
 * The component interior gives the color scores (background pixels are
 * treated as masked-to-grey and excluded from the mean); the border hue
 * recovers the category index, which is mapped back to a name through the
 * category list supplied by the caller.
 */

import type { RawDetection } from "./formats.js";
import type { Raster } from "./image.js";
import { BACKGROUND, borderCategoryIndex, colorScores, type Rgb } from "./palette.js";

function isBackground(rgb: Rgb): boolean {
  return rgb[0] === BACKGROUND[0] && rgb[1] === BACKGROUND[1] && rgb[2] === BACKGROUND[2];
}

export function detectImage(raster: Raster, categories: string[]): RawDetection[] {
  const { width, height } = raster;
  const seen = new Uint8Array(width * height);
  const detections: RawDetection[] = [];

  for (let sy = 0; sy < height; sy++) {
    for (let sx = 0; sx < width; sx++) {
      const start = sy * width + sx;
      if (seen[start] || isBackground(raster.get(sx, sy))) continue;

      // Flood fill one component of non-background pixels.
      let minX = sx, maxX = sx, minY = sy, maxY = sy;
      let categoryIndex: number | null = null;
      let sumR = 0, sumG = 0, sumB = 0, interior = 0;
      const stack = [start];
      seen[start] = 1;
      while (stack.length > 0) {
        const at = stack.pop()!;
        const x = at % width;
        const y = Math.floor(at / width);
        const rgb = raster.get(x, y);
        const border = borderCategoryIndex(rgb);
        if (border !== null) {
          categoryIndex = border;
        } else {
          sumR += rgb[0];
          sumG += rgb[1];
          sumB += rgb[2];
          interior++;
        }
        minX = Math.min(minX, x);
        maxX = Math.max(maxX, x);
        minY = Math.min(minY, y);
        maxY = Math.max(maxY, y);
        for (const [dx, dy] of [[1, 0], [-1, 0], [0, 1], [0, -1]] as const) {
          const nx = x + dx, ny = y + dy;
          if (!raster.inBounds(nx, ny)) continue;
          const ni = ny * width + nx;
          if (seen[ni] || isBackground(raster.get(nx, ny))) continue;
          seen[ni] = 1;
          stack.push(ni);
        }
      }

      if (categoryIndex === null || categoryIndex >= categories.length || interior === 0) {
        continue; // stray pixels with no readable category tag
      }
      const w = maxX - minX + 1;
      const h = maxY - minY + 1;
      const mean: Rgb = [sumR / interior, sumG / interior, sumB / interior];
      detections.push({
        category: categories[categoryIndex]!,
        confidence: 0.95,
        box: [minX + w / 2, minY + h / 2, w, h],
        colorScores: colorScores(mean),
      });
    }
  }
  return detections;
}
