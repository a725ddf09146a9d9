/**
 * Netpbm image I/O. Reads grayscale PGM (P2/P5) and color PPM (P3/P6);
 * color pixels are converted to grayscale by channel average. Writes
 * binary PGM (maxval 255).
 */

import fs from "node:fs";

export interface GrayImage {
  width: number;
  height: number;
  /** row-major intensities in [0, 1] */
  pixels: Float64Array;
}

const MAGICS = new Set(["P2", "P3", "P5", "P6"]);

export function readNetpbm(path: string): GrayImage {
  const data = fs.readFileSync(path);
  let pos = 0;

  function nextToken(): string {
    while (pos < data.length) {
      const ch = data[pos];
      if (ch === 0x23) {
        // '#' comment to end of line
        while (pos < data.length && data[pos] !== 0x0a) pos++;
      } else if (ch === 0x20 || ch === 0x09 || ch === 0x0a || ch === 0x0d) {
        pos++;
      } else {
        break;
      }
    }
    const start = pos;
    while (pos < data.length && !isSpace(data[pos])) pos++;
    if (start === pos) throw new Error(`${path}: truncated header`);
    return data.subarray(start, pos).toString("ascii");
  }

  const magic = nextToken();
  if (!MAGICS.has(magic)) {
    throw new Error(`${path}: unsupported image format (magic ${magic})`);
  }
  const width = parseInt(nextToken(), 10);
  const height = parseInt(nextToken(), 10);
  const maxval = parseInt(nextToken(), 10);
  if (!(width >= 1) || !(height >= 1) || !(maxval >= 1) || maxval > 65535) {
    throw new Error(`${path}: invalid dimensions or maxval`);
  }
  const channels = magic === "P3" || magic === "P6" ? 3 : 1;
  const count = width * height * channels;
  const values = new Float64Array(count);

  if (magic === "P5" || magic === "P6") {
    pos++; // single whitespace byte after maxval
    const wide = maxval > 255;
    const need = count * (wide ? 2 : 1);
    if (data.length - pos < need) throw new Error(`${path}: truncated pixel data`);
    for (let i = 0; i < count; i++) {
      values[i] = wide ? data.readUInt16BE(pos + 2 * i) : data[pos + i];
    }
  } else {
    for (let i = 0; i < count; i++) {
      const v = parseInt(nextToken(), 10);
      if (Number.isNaN(v)) throw new Error(`${path}: non-numeric pixel data`);
      values[i] = v;
    }
  }

  const pixels = new Float64Array(width * height);
  for (let i = 0; i < width * height; i++) {
    if (channels === 1) {
      pixels[i] = values[i] / maxval;
    } else {
      pixels[i] = (values[3 * i] + values[3 * i + 1] + values[3 * i + 2]) / (3 * maxval);
    }
  }
  return { width, height, pixels };
}

export function writePgm(image: GrayImage, path: string): void {
  const header = Buffer.from(`P5\n${image.width} ${image.height}\n255\n`, "ascii");
  const body = Buffer.alloc(image.width * image.height);
  for (let i = 0; i < body.length; i++) {
    body[i] = Math.max(0, Math.min(255, Math.round(image.pixels[i] * 255)));
  }
  fs.writeFileSync(path, Buffer.concat([header, body]));
}

function isSpace(byte: number): boolean {
  return byte === 0x20 || byte === 0x09 || byte === 0x0a || byte === 0x0d;
}
