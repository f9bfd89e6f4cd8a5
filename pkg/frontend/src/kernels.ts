/**
 * Compute-kernel device twins: Brownian step, Potts checkerboard update and
 * grid assembly, all-pairs N-body integration, mesh breathing.
 *
 * Each kernel reproduces its host reference bit-for-bit where arithmetic
 * allows (integer lattices, float32 single-rounding updates) and to within
 * 1e-5 per coordinate where accumulation order differs (N-body float64
 * reductions).
 */

import { standardNormal, uniform01 } from "./rng.js";

const BROWNIAN_INIT_STREAM = 0xffffffffffffffffn;
const POTTS_INIT_STREAM = 0xfffffffffffffffen;
const NBODY_INIT_STREAM = 0xfffffffffffffffdn;

// ---------------------------------------------------------------------------
// Brownian point cloud
// ---------------------------------------------------------------------------

/** (n*3) float32 positions uniform in [0, extent]^3, deterministic in seed. */
export function initRandomPositions(seed: bigint, n: number, extent = 1.0): Float32Array {
  const out = new Float32Array(n * 3);
  for (let c = 0; c < n * 3; c++) {
    out[c] = uniform01(seed, BROWNIAN_INIT_STREAM, BigInt(c)) * extent;
  }
  return out;
}

/**
 * One Brownian update in place: coordinate += sigma * N(0, 1).
 *
 * The normal draw for (point i, axis a) comes from counter i*3 + a on
 * stream `iteration`; the step is rounded to float32 before the float32
 * add, matching the host's single-precision arithmetic exactly.
 */
export function brownianStep(
  positions: Float32Array,
  n: number,
  sigma: number,
  iteration: number,
  seed: bigint,
): void {
  if (sigma === 0.0) return;
  for (let c = 0; c < n * 3; c++) {
    const z = standardNormal(seed, BigInt(iteration), BigInt(c));
    positions[c] = positions[c] + Math.fround(sigma * z);
  }
}

// ---------------------------------------------------------------------------
// Potts lattice on a checkerboard
// ---------------------------------------------------------------------------

export type CellSet = "white" | "black";

export interface PottsState {
  length: number;
  q: number;
  temperature: number;
  seed: bigint;
  coupling: number;
  white: Int32Array;
  black: Int32Array;
}

/** Assemble packed parity halves into the full row-major lattice. */
export function pottsWriteGrid(white: Int32Array, black: Int32Array, length: number): Int32Array {
  const half = length / 2;
  const grid = new Int32Array(length * length);
  for (let row = 0; row < length; row++) {
    for (let col = 0; col < length; col++) {
      const packed = row * half + (col >> 1);
      const source = (row + col) % 2 === 0 ? white : black;
      grid[row * length + col] = source[packed];
    }
  }
  return grid;
}

/** Inverse of pottsWriteGrid. */
export function pottsDisassembleGrid(grid: Int32Array, length: number): [Int32Array, Int32Array] {
  const half = length / 2;
  const white = new Int32Array(length * half);
  const black = new Int32Array(length * half);
  for (let row = 0; row < length; row++) {
    for (let col = 0; col < length; col++) {
      const packed = row * half + (col >> 1);
      if ((row + col) % 2 === 0) white[packed] = grid[row * length + col];
      else black[packed] = grid[row * length + col];
    }
  }
  return [white, black];
}

/** Fresh lattice with spins uniform over [0, q), packed by parity. */
export function pottsInitState(
  length: number,
  q: number,
  temperature: number,
  seed: bigint,
  coupling = 1.0,
): PottsState {
  const spins = new Int32Array(length * length);
  for (let cell = 0; cell < length * length; cell++) {
    spins[cell] = Math.floor(uniform01(seed, POTTS_INIT_STREAM, BigInt(cell)) * q);
  }
  const [white, black] = pottsDisassembleGrid(spins, length);
  return { length, q, temperature, seed, coupling, white, black };
}

/**
 * One Metropolis sweep over a parity set; returns the updated packed array.
 *
 * Proposals are uniform over [0, q); the energy change counts matching
 * spins among the 4 periodic lattice neighbors (all in the opposite set);
 * acceptance uses min(1, exp(-dE / T)).
 */
export function pottsUpdate(state: PottsState, cellSet: CellSet, iteration: number): Int32Array {
  const { length } = state;
  const half = length / 2;
  const parity = cellSet === "white" ? 0 : 1;
  const own = cellSet === "white" ? state.white : state.black;
  const other = cellSet === "white" ? state.black : state.white;
  const stream = BigInt(iteration * 2 + parity);

  const out = new Int32Array(own.length);
  for (let p = 0; p < own.length; p++) {
    const row = Math.floor(p / half);
    const col = 2 * (p % half) + ((row + parity) % 2);

    let matchesOld = 0;
    let spin = own[p];
    const neighbors = [
      [(row - 1 + length) % length, col],
      [(row + 1) % length, col],
      [row, (col - 1 + length) % length],
      [row, (col + 1) % length],
    ];

    const uProp = uniform01(state.seed, stream, BigInt(p) * 2n);
    const uAcc = uniform01(state.seed, stream, BigInt(p) * 2n + 1n);
    const proposal = Math.floor(uProp * state.q);

    let matchesNew = 0;
    for (const [nrow, ncol] of neighbors) {
      const neighbor = other[nrow * half + (ncol >> 1)];
      if (neighbor === spin) matchesOld++;
      if (neighbor === proposal) matchesNew++;
    }

    const deltaE = -state.coupling * (matchesNew - matchesOld);
    out[p] = uAcc < Math.exp(-deltaE / state.temperature) ? proposal : spin;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gravitational N-body
// ---------------------------------------------------------------------------

export interface NBodyState {
  n: number;
  dt: number;
  damping: number;
  softeningSq: number;
  /** Two ping-pong (n*4) float32 buffers: x, y, z, mass. */
  positions: [Float32Array, Float32Array];
  /** (n*3) float32 velocities. */
  velocities: Float32Array;
  readIndex: 0 | 1;
}

/** (n*4) float32 bodies: positions uniform in [0, extent]^3, unit mass. */
export function initBodies(seed: bigint, n: number, extent = 1.0): Float32Array {
  const out = new Float32Array(n * 4);
  for (let i = 0; i < n; i++) {
    for (let a = 0; a < 3; a++) {
      out[i * 4 + a] = uniform01(seed, NBODY_INIT_STREAM, BigInt(i * 3 + a)) * extent;
    }
    out[i * 4 + 3] = 1.0;
  }
  return out;
}

export function makeNBodyState(
  n: number,
  opts: { dt?: number; damping?: number; softeningSq?: number; seed?: bigint } = {},
): NBodyState {
  const seed = opts.seed ?? 0n;
  return {
    n,
    dt: opts.dt ?? 0.016,
    damping: opts.damping ?? 0.995,
    softeningSq: opts.softeningSq ?? 0.01,
    positions: [initBodies(seed, n), new Float32Array(n * 4)],
    velocities: new Float32Array(n * 3),
    readIndex: 0,
  };
}

/**
 * One all-pairs step: read buffer -> write buffer, then damped velocities.
 *
 * a_i = sum_j m_j * d_ij / (|d_ij|^2 + eps^2)^(3/2) with d_ij = p_j - p_i;
 * v <- (v + a*dt) * damping; p <- p + v*dt. Accumulation runs in float64;
 * the float64 velocity (not its float32 store) advances the positions,
 * matching the host reference's rounding points.
 */
export function nbodyIntegrate(state: NBodyState): void {
  const { n, dt, damping, softeningSq } = state;
  const src = state.positions[state.readIndex];
  const dst = state.positions[1 - state.readIndex];

  const velD = new Float64Array(n * 3);
  for (let i = 0; i < n; i++) {
    let ax = 0;
    let ay = 0;
    let az = 0;
    const xi = src[i * 4];
    const yi = src[i * 4 + 1];
    const zi = src[i * 4 + 2];
    for (let j = 0; j < n; j++) {
      const dx = src[j * 4] - xi;
      const dy = src[j * 4 + 1] - yi;
      const dz = src[j * 4 + 2] - zi;
      const r2 = dx * dx + dy * dy + dz * dz + softeningSq;
      const w = src[j * 4 + 3] / (r2 * Math.sqrt(r2));
      ax += w * dx;
      ay += w * dy;
      az += w * dz;
    }
    velD[i * 3] = (state.velocities[i * 3] + ax * dt) * damping;
    velD[i * 3 + 1] = (state.velocities[i * 3 + 1] + ay * dt) * damping;
    velD[i * 3 + 2] = (state.velocities[i * 3 + 2] + az * dt) * damping;
  }

  for (let i = 0; i < n; i++) {
    for (let a = 0; a < 3; a++) {
      dst[i * 4 + a] = src[i * 4 + a] + velD[i * 3 + a] * dt;
      state.velocities[i * 3 + a] = velD[i * 3 + a];
    }
    dst[i * 4 + 3] = src[i * 4 + 3];
  }
}

export function nbodySwap(state: NBodyState): void {
  state.readIndex = state.readIndex === 0 ? 1 : 0;
}

// ---------------------------------------------------------------------------
// Mesh breathing
// ---------------------------------------------------------------------------

export const VARY_ANGLE_INCREMENT_DEG = 2.0;

/**
 * One oscillator tick: returns [scale, advanced angle in degrees].
 * scale = amplitude * sin(radians(degrees)).
 */
export function varyAngle(
  degrees: number,
  amplitude = 0.2,
  increment = VARY_ANGLE_INCREMENT_DEG,
): [number, number] {
  return [amplitude * Math.sin((degrees * Math.PI) / 180.0), degrees + increment];
}

/** Displace every vertex along its normal: rest + scale * normal. */
export function breatheDeform(
  rest: Float32Array,
  normals: ArrayLike<number>,
  scale: number,
): Float32Array {
  const out = new Float32Array(rest.length);
  for (let i = 0; i < rest.length; i++) {
    out[i] = rest[i] + scale * normals[i];
  }
  return out;
}
