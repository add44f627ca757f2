/** Small deterministic PRNG (splitmix32) seeded from a benchmark entry seed.
 *
 * Entry seeds are unsigned 64-bit integers that can exceed
 * Number.MAX_SAFE_INTEGER, so they travel as BigInt and are folded to 32
 * bits here.
 */

export function foldSeed(seed: bigint): number {
  const mask = 0xffffffffn;
  return Number(((seed >> 32n) ^ (seed & mask)) & mask) >>> 0;
}

export class Rng {
  private state: number;

  constructor(seed: bigint | number) {
    this.state = (typeof seed === "bigint" ? foldSeed(seed) : seed >>> 0) >>> 0;
  }

  /** Uniform float in [0, 1). */
  next(): number {
    this.state = (this.state + 0x9e3779b9) >>> 0;
    let z = this.state;
    z ^= z >>> 16;
    z = Math.imul(z, 0x21f0aaad);
    z ^= z >>> 15;
    z = Math.imul(z, 0x735a2d97);
    z ^= z >>> 15;
    return (z >>> 0) / 4294967296;
  }

  /** Uniform integer in [0, n). */
  int(n: number): number {
    return Math.floor(this.next() * n);
  }

  pick<T>(items: readonly T[]): T {
    const item = items[this.int(items.length)];
    if (item === undefined) throw new Error("pick from empty list");
    return item;
  }
}
