export * from "./rng.js";
export * from "./kernels.js";
export * from "./markers.js";
export * from "./variants.js";
export * from "./ppm.js";
