/** The seven-color palette shared with the core scorer, with the RGB values
 * the toy renderer paints and the toy detector scores against.
 */

export type Rgb = readonly [number, number, number];

export const PALETTE = ["green", "red", "yellow", "brown", "black", "white", "blue"] as const;
export type PaletteColor = (typeof PALETTE)[number];

export const PALETTE_RGB: Record<PaletteColor, Rgb> = {
  green: [0, 140, 60],
  red: [210, 30, 40],
  yellow: [240, 210, 40],
  brown: [140, 80, 30],
  black: [25, 25, 25],
  white: [245, 245, 245],
  blue: [40, 90, 210],
};

/** Neutral canvas color; also what masked-out background becomes. */
export const BACKGROUND: Rgb = [128, 128, 128];

/** Border hue that tags every rendered instance with its category index.
 * The red channel is a fixed marker, green carries the index.
 */
export function categoryBorder(index: number): Rgb {
  if (index < 0 || index > 63) throw new Error(`category index out of range: ${index}`);
  return [10, 64 + index * 3, 200];
}

export function borderCategoryIndex(rgb: Rgb): number | null {
  if (rgb[0] !== 10 || rgb[2] !== 200) return null;
  const index = (rgb[1] - 64) / 3;
  return Number.isInteger(index) && index >= 0 && index <= 63 ? index : null;
}

export function colorDistance(a: Rgb, b: Rgb): number {
  return Math.hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

/** Similarity scores against every palette color, scaled to [0, 1]. */
export function colorScores(rgb: Rgb): Record<PaletteColor, number> {
  const out = {} as Record<PaletteColor, number>;
  const maxDistance = Math.hypot(255, 255, 255);
  for (const name of PALETTE) {
    out[name] = 1 - colorDistance(rgb, PALETTE_RGB[name]) / maxDistance;
  }
  return out;
}
