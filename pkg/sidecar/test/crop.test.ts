import fs from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { cropImage, maskBboxWithMargin } from "../dist/crop.js";
import { GrayImage } from "../dist/pgm.js";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const FIXTURE = path.join(HERE, "..", "fixtures", "crop_cases.json");
const PRIMARY_FIXTURE = path.join(
  HERE, "..", "..", "tests", "fixtures", "crop_cases.json"
);

interface CropCase {
  name: string;
  width: number;
  height: number;
  pixels?: [number, number][];
  rect?: [number, number, number, number];
  margin: number;
  bbox: [number, number, number, number];
}

function maskFrom(c: CropCase): GrayImage {
  const pixels = new Float64Array(c.width * c.height);
  for (const [x, y] of c.pixels ?? []) pixels[y * c.width + x] = 1;
  if (c.rect) {
    const [x0, y0, x1, y1] = c.rect;
    for (let y = y0; y <= y1; y++)
      for (let x = x0; x <= x1; x++) pixels[y * c.width + x] = 1;
  }
  return { width: c.width, height: c.height, pixels };
}

describe("mask crop rule", () => {
  const cases: CropCase[] = JSON.parse(fs.readFileSync(FIXTURE, "utf8"));

  it("matches every shared fixture case", () => {
    expect(cases.length).toBeGreaterThan(0);
    for (const c of cases) {
      const bbox = maskBboxWithMargin(maskFrom(c), c.margin);
      expect([bbox.x0, bbox.y0, bbox.x1, bbox.y1], c.name).toEqual(c.bbox);
    }
  });

  it("uses the identical fixture file as the numeric pipeline's tests", () => {
    const ours = JSON.parse(fs.readFileSync(FIXTURE, "utf8"));
    const theirs = JSON.parse(fs.readFileSync(PRIMARY_FIXTURE, "utf8"));
    expect(ours).toEqual(theirs);
  });

  it("crops pixel data to the bbox", () => {
    const image: GrayImage = {
      width: 4,
      height: 3,
      pixels: new Float64Array([0, 0.1, 0.2, 0, 0, 0.3, 0.4, 0, 0, 0, 0, 0]),
    };
    const out = cropImage(image, { x0: 1, y0: 0, x1: 2, y1: 1 });
    expect(out.width).toBe(2);
    expect(out.height).toBe(2);
    expect([...out.pixels]).toEqual([0.1, 0.2, 0.3, 0.4]);
  });

  it("rejects empty masks and negative margins", () => {
    const empty: GrayImage = { width: 3, height: 3, pixels: new Float64Array(9) };
    expect(() => maskBboxWithMargin(empty, 0)).toThrow(/no foreground/);
    const one: GrayImage = {
      width: 3,
      height: 3,
      pixels: new Float64Array([0, 0, 0, 0, 1, 0, 0, 0, 0]),
    };
    expect(() => maskBboxWithMargin(one, -1)).toThrow(/margin/);
  });
});
