/** Minimal RGB raster with binary PPM (P6) serialization.
 *
 * PPM keeps the pipeline free of image-codec dependencies while still being
 * a real file format, and — being uncompressed — makes the "same seed, same
 * bytes" guarantee easy to check.
 */

import { BACKGROUND, type Rgb } from "./palette.js";

export class Raster {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8ClampedArray;

  constructor(width: number, height: number, fill: Rgb = BACKGROUND) {
    this.width = width;
    this.height = height;
    this.data = new Uint8ClampedArray(width * height * 3);
    for (let i = 0; i < width * height; i++) {
      this.data[i * 3] = fill[0];
      this.data[i * 3 + 1] = fill[1];
      this.data[i * 3 + 2] = fill[2];
    }
  }

  inBounds(x: number, y: number): boolean {
    return x >= 0 && y >= 0 && x < this.width && y < this.height;
  }

  get(x: number, y: number): Rgb {
    const i = (y * this.width + x) * 3;
    return [this.data[i]!, this.data[i + 1]!, this.data[i + 2]!];
  }

  set(x: number, y: number, rgb: Rgb): void {
    if (!this.inBounds(x, y)) return;
    const i = (y * this.width + x) * 3;
    this.data[i] = rgb[0];
    this.data[i + 1] = rgb[1];
    this.data[i + 2] = rgb[2];
  }

  fillRect(x0: number, y0: number, w: number, h: number, rgb: Rgb): void {
    for (let y = y0; y < y0 + h; y++) {
      for (let x = x0; x < x0 + w; x++) this.set(x, y, rgb);
    }
  }

  /** One-pixel frame just inside the given rectangle. */
  strokeRect(x0: number, y0: number, w: number, h: number, rgb: Rgb): void {
    for (let x = x0; x < x0 + w; x++) {
      this.set(x, y0, rgb);
      this.set(x, y0 + h - 1, rgb);
    }
    for (let y = y0; y < y0 + h; y++) {
      this.set(x0, y, rgb);
      this.set(x0 + w - 1, y, rgb);
    }
  }

  toPpm(): Buffer {
    const header = Buffer.from(`P6\n${this.width} ${this.height}\n255\n`, "ascii");
    return Buffer.concat([header, Buffer.from(this.data)]);
  }

  static fromPpm(buffer: Buffer): Raster {
    const text = buffer.subarray(0, 64).toString("ascii");
    const match = /^P6\s+(\d+)\s+(\d+)\s+255\s/.exec(text);
    if (!match) throw new Error("not a binary PPM (P6, maxval 255) file");
    const width = Number(match[1]);
    const height = Number(match[2]);
    const offset = match[0].length;
    const expected = width * height * 3;
    if (buffer.length - offset !== expected) {
      throw new Error(`PPM payload is ${buffer.length - offset} bytes, expected ${expected}`);
    }
    const raster = new Raster(width, height);
    raster.data.set(buffer.subarray(offset));
    return raster;
  }
}
