import { describe, expect, it } from "vitest";

import { readPPM } from "../src/ppm.js";

function encode(header: string, raster: number[]): Uint8Array {
  const head = new TextEncoder().encode(header);
  const out = new Uint8Array(head.length + raster.length);
  out.set(head);
  out.set(raster, head.length);
  return out;
}

describe("ppm reader", () => {
  it("parses a minimal P6 image", () => {
    const img = readPPM(encode("P6\n2 1\n255\n", [1, 2, 3, 4, 5, 6]));
    expect(img.width).toBe(2);
    expect(img.height).toBe(1);
    expect(Array.from(img.data)).toEqual([1, 2, 3, 4, 5, 6]);
  });

  it("skips header comments", () => {
    const img = readPPM(encode("P6\n# made by a test\n1 1\n255\n", [9, 9, 9]));
    expect(img.width).toBe(1);
    expect(Array.from(img.data)).toEqual([9, 9, 9]);
  });

  it("rejects wrong magic and truncated rasters", () => {
    expect(() => readPPM(encode("P5\n1 1\n255\n", [0]))).toThrow(/magic/);
    expect(() => readPPM(encode("P6\n2 2\n255\n", [1, 2, 3]))).toThrow(/truncated/);
  });
});
