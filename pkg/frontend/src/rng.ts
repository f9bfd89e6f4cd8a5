/**
 * Counter-based deterministic random numbers.
 *
 * Every draw is a pure function of (seed, stream, counter), so the host
 * library and these device twins produce identical sequences with no
 * generator state. The mixer is the splitmix64 finalizer applied to a
 * seed/stream/counter chain; BigInt keeps the 64-bit wraparound exact.
 */

const MASK64 = (1n << 64n) - 1n;
const GOLDEN = 0x9e3779b97f4a7c15n;
const MIX1 = 0xbf58476d1ce4e5b9n;
const MIX2 = 0x94d049bb133111ebn;

// 2**-53, so (h >> 11) * INV53 covers [0, 1) on 53 bits.
const INV53 = 2 ** -53;

/** splitmix64 finalizer over a 64-bit lane. */
export function mix(x: bigint): bigint {
  x = (x + GOLDEN) & MASK64;
  x = ((x ^ (x >> 30n)) * MIX1) & MASK64;
  x = ((x ^ (x >> 27n)) * MIX2) & MASK64;
  return x ^ (x >> 31n);
}

/** Hash one counter under a (seed, stream) pair to uint64. */
export function hashU64(seed: bigint, stream: bigint, counter: bigint): bigint {
  const base = mix(mix(seed & MASK64) ^ (stream & MASK64));
  return mix((counter ^ base) & MASK64);
}

/** One uniform draw in [0, 1). */
export function uniform01(seed: bigint, stream: bigint, counter: bigint): number {
  return Number(hashU64(seed, stream, counter) >> 11n) * INV53;
}

/**
 * One standard normal draw via Box-Muller.
 *
 * Each output consumes the two sub-counters 2c and 2c+1 so any subset of
 * counters can be evaluated independently (matching the host reference).
 */
export function standardNormal(seed: bigint, stream: bigint, counter: bigint): number {
  const u1 = uniform01(seed, stream, counter * 2n);
  const u2 = uniform01(seed, stream, counter * 2n + 1n);
  // 1 - u1 is in (0, 1], keeping the log argument away from zero.
  return Math.sqrt(-2.0 * Math.log1p(-u1)) * Math.cos(2.0 * Math.PI * u2);
}
