import fs from "node:fs";
import os from "node:os";
import path from "node:path";

import { GrayImage, writePgm } from "../dist/pgm.js";

export function tempDir(prefix: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), prefix));
}

/** Deterministic PRNG so fixture images are stable across runs. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function speckledImage(size: number, seed: number): GrayImage {
  const random = mulberry32(seed);
  const pixels = new Float64Array(size * size);
  for (let i = 0; i < pixels.length; i++) pixels[i] = random();
  return { width: size, height: size, pixels };
}

export function gradientImage(size: number, offset = 0): GrayImage {
  const pixels = new Float64Array(size * size);
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      pixels[y * size + x] = ((x + y + offset) % (2 * size)) / (2 * size);
    }
  }
  return { width: size, height: size, pixels };
}

export function writeImage(dir: string, name: string, image: GrayImage): string {
  fs.mkdirSync(dir, { recursive: true });
  const p = path.join(dir, name);
  writePgm(image, p);
  return p;
}

export function writeDescriptorJson(
  dir: string,
  positive: string[],
  negative: string[]
): string {
  const payload = [
    {
      set_id: "toy-pos",
      class_label: 1,
      class_name: "speckled",
      descriptors: positive,
      provenance: "test fixture",
    },
    {
      set_id: "toy-neg",
      class_label: -1,
      class_name: "smooth",
      descriptors: negative,
      provenance: "test fixture",
    },
  ];
  const p = path.join(dir, "descriptors.json");
  fs.writeFileSync(p, JSON.stringify(payload, null, 2));
  return p;
}
