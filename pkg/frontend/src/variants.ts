/**
 * Shader variant resolution with a memoized pipeline cache.
 *
 * Every view resolves to exactly one variant, keyed by view type, domain,
 * marker shape/style and the bound property formats. Variants are generated
 * from small WGSL templates with compile-time switches: present properties
 * read from storage buffers, absent ones from uniform defaults, and 64-bit
 * position formats convert to f32 at read.
 */

import type { MarkerShape, MarkerStyleKind } from "./markers.js";

export type ViewType = "markers" | "edges" | "voxels";
export type SpatialDomain = "2d" | "3d";

export interface PositionFormat {
  bitWidth: 32 | 64;
  components: 2 | 3 | 4;
}

export interface ShaderVariantKey {
  viewType: ViewType;
  domain: SpatialDomain;
  /** Markers only. */
  shape?: MarkerShape;
  style?: MarkerStyleKind;
  hasColor: boolean;
  hasSize: boolean;
  hasRotation: boolean;
  /** Color read through an integer index buffer of this byte width. */
  colorIndexSize?: 1 | 2 | 4;
  positionFormat: PositionFormat;
}

export interface VariantProgram {
  key: string;
  source: string;
  vertexEntry: string;
  fragmentEntry: string;
}

/**
 * Canonical identity string of the pipeline a key resolves to. Matches the
 * format the host library prints for --dump-shaders, so both sides of the
 * interface can be diffed textually.
 */
export function variantKeyString(key: ShaderVariantKey): string {
  const parts: string[] = [key.viewType, key.domain];
  if (key.viewType === "markers") {
    parts.push(key.shape ?? "disc", key.style ?? "filled");
  }
  const tokens: string[] = [];
  if (key.hasColor) {
    let token = "color=float32x4";
    if (key.colorIndexSize) token += `@idx${key.colorIndexSize * 8}`;
    tokens.push(token);
  }
  tokens.push(`position=float${key.positionFormat.bitWidth}x${key.positionFormat.components}`);
  if (key.hasRotation) tokens.push("rotation=float32x1");
  if (key.hasSize) tokens.push("size=float32x1");
  return parts.join("/") + "|" + tokens.join(",");
}

function positionRead(fmt: PositionFormat): string {
  const comps = ["x", "y", "z", "w"].slice(0, Math.min(fmt.components, 3));
  const pad = fmt.components === 2 ? ", 0.0" : "";
  if (fmt.bitWidth === 64) {
    // 64-bit storage arrives as lo/hi word pairs; convert to f32 at read.
    const converted = comps.map((c) => `f64_to_f32(src.${c}_lo, src.${c}_hi)`).join(", ");
    return `let position = vec3<f32>(${converted}${pad});`;
  }
  return `let position = vec3<f32>(${comps.map((c) => `src.${c}`).join(", ")}${pad});`;
}

function colorRead(key: ShaderVariantKey): string {
  if (!key.hasColor) {
    return "let color = uniforms.default_color;";
  }
  if (key.colorIndexSize) {
    return "let color = colors[indices[element]];";
  }
  return "let color = colors[element];";
}

function sizeRead(key: ShaderVariantKey): string {
  return key.hasSize ? "let size = sizes[element];" : "let size = uniforms.default_size;";
}

function fragmentBody(key: ShaderVariantKey): string {
  if (key.viewType !== "markers") {
    return "  return vary.color;";
  }
  const sdf = {
    disc: "length(vary.local) - vary.radius",
    diamond: "(abs(vary.local.x) + abs(vary.local.y) - vary.radius) * 0.70710678",
    arrow: "arrow_sdf(vary.local / vary.radius) * vary.radius",
  }[key.shape ?? "disc"];
  const coverage = {
    filled: "1.0 - smoothstep(-0.5, 0.5, d)",
    stroked: "1.0 - smoothstep(uniforms.linewidth * 0.5 - 0.5, uniforms.linewidth * 0.5 + 0.5, abs(d))",
    outlined:
      "max(1.0 - smoothstep(-0.5, 0.5, d), 1.0 - smoothstep(uniforms.linewidth * 0.5 - 0.5, uniforms.linewidth * 0.5 + 0.5, abs(d)))",
  }[key.style ?? "filled"];
  return `  let d = ${sdf};\n  let alpha = ${coverage};\n  return vec4<f32>(vary.color.rgb, vary.color.a * alpha);`;
}

/** Generate the WGSL source for one variant. */
export function generateSource(key: ShaderVariantKey): string {
  const lines = [
    `// variant: ${variantKeyString(key)}`,
    "",
    "struct Uniforms {",
    "  view_proj: mat4x4<f32>,",
    "  default_color: vec4<f32>,",
    "  default_size: f32,",
    "  linewidth: f32,",
    "};",
    "@group(0) @binding(0) var<uniform> uniforms: Uniforms;",
    "@group(0) @binding(1) var<storage, read> positions: array<Position>;",
  ];
  if (key.hasColor) {
    lines.push("@group(0) @binding(2) var<storage, read> colors: array<vec4<f32>>;");
  }
  if (key.colorIndexSize) {
    lines.push("@group(0) @binding(3) var<storage, read> indices: array<u32>;");
  }
  if (key.hasSize) {
    lines.push("@group(0) @binding(4) var<storage, read> sizes: array<f32>;");
  }
  lines.push(
    "",
    "@vertex",
    "fn vs_main(@builtin(vertex_index) vid: u32) -> Varyings {",
    "  let element = vid / 6u;",
    "  let src = positions[element];",
    `  ${positionRead(key.positionFormat)}`,
    `  ${colorRead(key)}`,
    `  ${sizeRead(key)}`,
    "  return assemble(position, color, size, vid % 6u);",
    "}",
    "",
    "@fragment",
    "fn fs_main(vary: Varyings) -> @location(0) vec4<f32> {",
    fragmentBody(key),
    "}",
  );
  return lines.join("\n");
}

const cache = new Map<string, VariantProgram>();
let cacheHits = 0;
let cacheCompiles = 0;

/**
 * Resolve a key to its compiled program. Repeated requests for the same key
 * return the identical cached program and bump the hit counter; no view
 * creation recompiles an existing variant.
 */
export function resolveVariant(key: ShaderVariantKey): VariantProgram {
  const id = variantKeyString(key);
  const cached = cache.get(id);
  if (cached) {
    cacheHits++;
    return cached;
  }
  const program: VariantProgram = {
    key: id,
    source: generateSource(key),
    vertexEntry: "vs_main",
    fragmentEntry: "fs_main",
  };
  cache.set(id, program);
  cacheCompiles++;
  return program;
}

export function variantCacheStats(): { compiles: number; hits: number; size: number } {
  return { compiles: cacheCompiles, hits: cacheHits, size: cache.size };
}

export function clearVariantCache(): void {
  cache.clear();
  cacheHits = 0;
  cacheCompiles = 0;
}
