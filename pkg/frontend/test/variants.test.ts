import { beforeEach, describe, expect, it } from "vitest";

import {
  clearVariantCache,
  resolveVariant,
  variantCacheStats,
  variantKeyString,
  type ShaderVariantKey,
} from "../src/variants.js";

function markerKey(overrides: Partial<ShaderVariantKey> = {}): ShaderVariantKey {
  return {
    viewType: "markers",
    domain: "3d",
    shape: "disc",
    style: "filled",
    hasColor: false,
    hasSize: false,
    hasRotation: false,
    positionFormat: { bitWidth: 32, components: 3 },
    ...overrides,
  };
}

beforeEach(() => clearVariantCache());

describe("variant keys", () => {
  it("matches the key string the host CLI prints for --dump-shaders", () => {
    expect(variantKeyString(markerKey())).toBe("markers/3d/disc/filled|position=float32x3");
  });

  it("orders property tokens canonically", () => {
    const key = markerKey({ hasColor: true, hasSize: true, colorIndexSize: 4 });
    expect(variantKeyString(key)).toBe(
      "markers/3d/disc/filled|color=float32x4@idx32,position=float32x3,size=float32x1",
    );
  });

  it("keys voxel and edge views without marker fields", () => {
    const key: ShaderVariantKey = {
      viewType: "voxels",
      domain: "2d",
      hasColor: true,
      hasSize: false,
      hasRotation: false,
      colorIndexSize: 4,
      positionFormat: { bitWidth: 32, components: 3 },
    };
    expect(variantKeyString(key)).toBe("voxels/2d|color=float32x4@idx32,position=float32x3");
  });
});

describe("variant resolution and cache", () => {
  it("returns the identical cached program for a repeated key", () => {
    const a = resolveVariant(markerKey());
    const b = resolveVariant(markerKey());
    expect(b).toBe(a);
    expect(variantCacheStats()).toEqual({ compiles: 1, hits: 1, size: 1 });
  });

  it("never recompiles an existing variant across many requests", () => {
    for (let i = 0; i < 50; i++) resolveVariant(markerKey());
    expect(variantCacheStats().compiles).toBe(1);
    expect(variantCacheStats().hits).toBe(49);
  });

  it("instantiates variants on demand, bounded by distinct keys", () => {
    resolveVariant(markerKey());
    resolveVariant(markerKey({ shape: "diamond" }));
    resolveVariant(markerKey({ hasColor: true }));
    expect(variantCacheStats().size).toBe(3);
  });

  it("reads absent properties from uniform defaults", () => {
    const program = resolveVariant(markerKey());
    expect(program.source).toContain("let color = uniforms.default_color;");
    expect(program.source).toContain("let size = uniforms.default_size;");
    expect(program.source).not.toContain("var<storage, read> colors");
  });

  it("reads present properties from storage buffers", () => {
    const program = resolveVariant(markerKey({ hasColor: true, hasSize: true }));
    expect(program.source).toContain("var<storage, read> colors");
    expect(program.source).toContain("let color = colors[element];");
    expect(program.source).toContain("let size = sizes[element];");
  });

  it("routes indexed colors through the index buffer", () => {
    const program = resolveVariant(markerKey({ hasColor: true, colorIndexSize: 4 }));
    expect(program.source).toContain("let color = colors[indices[element]];");
  });

  it("converts 64-bit positions to f32 at read", () => {
    const program = resolveVariant(markerKey({ positionFormat: { bitWidth: 64, components: 2 } }));
    expect(program.source).toContain("f64_to_f32");
  });

  it("specializes the fragment stage per shape and style", () => {
    const disc = resolveVariant(markerKey());
    const stroked = resolveVariant(markerKey({ shape: "diamond", style: "stroked" }));
    expect(disc.source).toContain("length(vary.local) - vary.radius");
    expect(stroked.source).toContain("abs(vary.local.x) + abs(vary.local.y)");
    expect(stroked.source).toContain("uniforms.linewidth");
  });
});
