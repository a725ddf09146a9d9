/**
 * Mask-guided cropping: tight bounding box over the mask's foreground,
 * expanded by a margin on each side and clamped to the image bounds.
 * The rule intentionally duplicates the numeric pipeline's
 * crop_bbox_with_margin and is cross-checked against the shared fixture
 * file (fixtures/crop_cases.json) by both test suites.
 */

import { GrayImage } from "./pgm.js";

export interface Bbox {
  x0: number;
  y0: number;
  x1: number;
  y1: number; // inclusive
}

export function maskBboxWithMargin(
  mask: GrayImage,
  margin: number
): Bbox {
  if (margin < 0 || !Number.isInteger(margin)) {
    throw new Error(`margin must be a non-negative integer, got ${margin}`);
  }
  let x0 = Infinity;
  let y0 = Infinity;
  let x1 = -Infinity;
  let y1 = -Infinity;
  for (let y = 0; y < mask.height; y++) {
    for (let x = 0; x < mask.width; x++) {
      if (mask.pixels[y * mask.width + x] > 0) {
        if (x < x0) x0 = x;
        if (x > x1) x1 = x;
        if (y < y0) y0 = y;
        if (y > y1) y1 = y;
      }
    }
  }
  if (!Number.isFinite(x0)) throw new Error("mask has no foreground pixels");
  return {
    x0: Math.max(0, x0 - margin),
    y0: Math.max(0, y0 - margin),
    x1: Math.min(mask.width - 1, x1 + margin),
    y1: Math.min(mask.height - 1, y1 + margin),
  };
}

export function cropImage(image: GrayImage, bbox: Bbox): GrayImage {
  const width = bbox.x1 - bbox.x0 + 1;
  const height = bbox.y1 - bbox.y0 + 1;
  const pixels = new Float64Array(width * height);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      pixels[y * width + x] =
        image.pixels[(y + bbox.y0) * image.width + (x + bbox.x0)];
    }
  }
  return { width, height, pixels };
}
