/**
 * Embedding backends.
 *
 * `toy:<dim>` is a deterministic offline featurizer: images are
 * average-pooled onto a sqrt(dim) x sqrt(dim) grid, standardized and
 * L2-normalized; texts are hashed character trigrams in dim bins,
 * L2-normalized. Scores are dot products of the unit vectors, so they
 * live in [-1, 1] like cosine similarities from a real encoder.
 *
 * Real checkpoints (e.g. the ViT-bigG/14 CLIP this pipeline is meant to
 * reproduce with) need a model runtime and downloaded weights, neither of
 * which exists in this offline build; selecting such an identifier fails
 * with a pointer to the supported backends. The embed surface (descriptor
 * JSON in, matrix CSV out) is identical either way.
 */

import { GrayImage } from "./pgm.js";

export interface Featurizer {
  name: string;
  dim: number;
  imageVector(image: GrayImage): Float64Array;
  textVector(text: string): Float64Array;
}

export function createFeaturizer(model: string): Featurizer {
  const match = /^toy:(\d+)$/.exec(model.trim());
  if (!match) {
    throw new Error(
      `model "${model}" is not available in this build; supported backends: ` +
        `toy:<dim> (deterministic offline featurizer, dim a perfect square >= 4)`
    );
  }
  const dim = parseInt(match[1], 10);
  const side = Math.round(Math.sqrt(dim));
  if (side * side !== dim || dim < 4) {
    throw new Error(`toy featurizer dim must be a perfect square >= 4, got ${dim}`);
  }
  return {
    name: model,
    dim,
    imageVector: (image) => pooledImageVector(image, side),
    textVector: (text) => trigramVector(text, dim),
  };
}

export function similarity(a: Float64Array, b: Float64Array): number {
  let dot = 0;
  for (let i = 0; i < a.length; i++) dot += a[i] * b[i];
  return dot;
}

function pooledImageVector(image: GrayImage, side: number): Float64Array {
  const out = new Float64Array(side * side);
  const counts = new Float64Array(side * side);
  for (let y = 0; y < image.height; y++) {
    const cy = Math.min(side - 1, Math.floor((y * side) / image.height));
    for (let x = 0; x < image.width; x++) {
      const cx = Math.min(side - 1, Math.floor((x * side) / image.width));
      out[cy * side + cx] += image.pixels[y * image.width + x];
      counts[cy * side + cx] += 1;
    }
  }
  for (let i = 0; i < out.length; i++) {
    if (counts[i] > 0) out[i] /= counts[i];
  }
  standardize(out);
  l2Normalize(out);
  return out;
}

function trigramVector(text: string, dim: number): Float64Array {
  const out = new Float64Array(dim);
  const padded = `  ${text.toLowerCase().trim()}  `;
  for (let i = 0; i + 3 <= padded.length; i++) {
    const h = fnv1a(padded.slice(i, i + 3));
    out[h % dim] += 1;
  }
  l2Normalize(out);
  return out;
}

function standardize(v: Float64Array): void {
  let mean = 0;
  for (const x of v) mean += x;
  mean /= v.length;
  let variance = 0;
  for (const x of v) variance += (x - mean) * (x - mean);
  const sd = Math.sqrt(variance / v.length);
  for (let i = 0; i < v.length; i++) {
    v[i] = sd > 0 ? (v[i] - mean) / sd : 0;
  }
}

function l2Normalize(v: Float64Array): void {
  let norm = 0;
  for (const x of v) norm += x * x;
  norm = Math.sqrt(norm);
  if (norm > 0) {
    for (let i = 0; i < v.length; i++) v[i] /= norm;
  }
}

function fnv1a(s: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < s.length; i++) {
    h ^= s.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h;
}
