/**
 * Minimal binary PPM (P6) reader for render-parity fixtures.
 */

export interface PPMImage {
  width: number;
  height: number;
  /** Interleaved RGB, row-major from the top-left, one byte per channel. */
  data: Uint8Array;
}

export function readPPM(bytes: Uint8Array): PPMImage {
  // Header: "P6" <ws> width <ws> height <ws> maxval <single ws> raster.
  let pos = 0;
  const token = (): string => {
    while (pos < bytes.length && isSpace(bytes[pos])) pos++;
    if (bytes[pos] === 0x23) {
      // '#' comment runs to end of line
      while (pos < bytes.length && bytes[pos] !== 0x0a) pos++;
      return token();
    }
    const start = pos;
    while (pos < bytes.length && !isSpace(bytes[pos])) pos++;
    return String.fromCharCode(...bytes.subarray(start, pos));
  };

  const magic = token();
  if (magic !== "P6") throw new Error(`not a binary PPM: magic ${JSON.stringify(magic)}`);
  const width = parseInt(token(), 10);
  const height = parseInt(token(), 10);
  const maxval = parseInt(token(), 10);
  if (!(width > 0 && height > 0)) throw new Error("bad PPM dimensions");
  if (maxval !== 255) throw new Error(`unsupported maxval ${maxval}`);
  pos++; // exactly one whitespace byte before the raster

  const expected = width * height * 3;
  const data = bytes.subarray(pos, pos + expected);
  if (data.length !== expected) throw new Error("truncated PPM raster");
  return { width, height, data };
}

function isSpace(b: number): boolean {
  return b === 0x20 || b === 0x09 || b === 0x0a || b === 0x0d;
}
