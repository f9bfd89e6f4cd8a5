/**
 * Marker distance fields and antialiased coverage — the fragment-stage math.
 *
 * A signed distance in marker-local pixel coordinates (negative inside,
 * zero on the boundary) becomes a coverage alpha through a smooth falloff
 * one antialias band wide. Mirrors the host reference math so off-screen
 * renders agree per pixel.
 */

export type MarkerShape = "disc" | "diamond" | "arrow";
export type MarkerStyleKind = "filled" | "stroked" | "outlined";

export interface MarkerStyle {
  shape: MarkerShape;
  style: MarkerStyleKind;
  linewidth: number;
  antialiasBand: number;
}

export function makeMarkerStyle(
  shape: MarkerShape = "disc",
  style: MarkerStyleKind = "filled",
  linewidth = 1.0,
  antialiasBand = 1.0,
): MarkerStyle {
  if (antialiasBand <= 0) throw new Error("antialias band must be positive");
  if ((style === "stroked" || style === "outlined") && linewidth <= 0) {
    throw new Error(`${style} markers need a positive linewidth`);
  }
  return { shape, style, linewidth, antialiasBand };
}

const SQRT2 = Math.sqrt(2.0);

// Arrow outline pointing +x, inscribed in the unit radius. Head spans
// x in [0, 1], shaft half-height 0.2, head half-width 0.6. CCW order.
const ARROW_POLY: ReadonlyArray<[number, number]> = [
  [1.0, 0.0],
  [0.0, 0.6],
  [0.0, 0.2],
  [-1.0, 0.2],
  [-1.0, -0.2],
  [0.0, -0.2],
  [0.0, -0.6],
];

/** Exact signed distance to a closed polygon (negative inside). */
function polygonSDF(px: number, py: number, poly: ReadonlyArray<[number, number]>): number {
  let d = Infinity;
  let sign = 1.0;
  const n = poly.length;
  for (let i = 0; i < n; i++) {
    const vi = poly[i];
    const vj = poly[(i + n - 1) % n];
    const ex = vj[0] - vi[0];
    const ey = vj[1] - vi[1];
    const wx = px - vi[0];
    const wy = py - vi[1];
    const t = Math.min(1.0, Math.max(0.0, (wx * ex + wy * ey) / (ex * ex + ey * ey)));
    const bx = wx - ex * t;
    const by = wy - ey * t;
    d = Math.min(d, bx * bx + by * by);
    const c0 = py >= vi[1];
    const c1 = py < vj[1];
    const c2 = ex * wy > ey * wx;
    if ((c0 && c1 && c2) || (!c0 && !c1 && !c2)) sign = -sign;
  }
  return sign * Math.sqrt(d);
}

/**
 * Signed distance in pixels from (px, py) to the marker boundary.
 * The marker is centered at the origin with the given pixel radius;
 * distances are Euclidean for every shape so the antialias band has
 * uniform width.
 */
export function markerSDF(shape: MarkerShape, px: number, py: number, radius: number): number {
  switch (shape) {
    case "disc":
      return Math.hypot(px, py) - radius;
    case "diamond":
      // Normalized so the value is true distance to the diamond's faces.
      return (Math.abs(px) + Math.abs(py) - radius) / SQRT2;
    case "arrow": {
      // Exact polygon distance scales linearly with the radius.
      const safeR = Math.max(radius, 1e-12);
      return polygonSDF(px / safeR, py / safeR, ARROW_POLY) * safeR;
    }
  }
}

export function smoothstep(edge0: number, edge1: number, x: number): number {
  const t = Math.min(1.0, Math.max(0.0, (x - edge0) / (edge1 - edge0)));
  return t * t * (3.0 - 2.0 * t);
}

/**
 * Coverage alpha in [0, 1] for filled and stroked styles: 1 deep inside,
 * 0 far outside, 0.5 exactly on the boundary (filled); a band of width
 * linewidth around the boundary (stroked).
 */
export function markerCoverage(sdfValue: number, style: MarkerStyle): number {
  const band = style.antialiasBand;
  if (style.style === "filled") {
    return 1.0 - smoothstep(-band / 2.0, band / 2.0, sdfValue);
  }
  if (style.style === "stroked") {
    const half = style.linewidth / 2.0;
    return 1.0 - smoothstep(half - band / 2.0, half + band / 2.0, Math.abs(sdfValue));
  }
  throw new Error("use markerCoverageOutlined for the outlined style");
}

/** [fill alpha, stroke alpha] for the outlined style. */
export function markerCoverageOutlined(sdfValue: number, style: MarkerStyle): [number, number] {
  const band = style.antialiasBand;
  const fill = 1.0 - smoothstep(-band / 2.0, band / 2.0, sdfValue);
  const half = style.linewidth / 2.0;
  const stroke = 1.0 - smoothstep(half - band / 2.0, half + band / 2.0, Math.abs(sdfValue));
  return [fill, stroke];
}
