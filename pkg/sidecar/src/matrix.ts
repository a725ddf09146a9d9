/**
 * Similarity-matrix CSV, bit-conformant to the numeric pipeline's format:
 * header `image_id,label,<class>:<index>:<base64url(text)>,...`, one row
 * per image, label tokens "+1"/"-1", values with 17 significant digits,
 * UTF-8, LF line endings.
 */

import fs from "node:fs";

export interface DescriptorKey {
  classLabel: 1 | -1;
  index: number;
  text: string;
}

export interface SimilarityTable {
  imageIds: string[];
  labels: (1 | -1)[];
  keys: DescriptorKey[];
  /** row-major values, one row per image */
  values: number[][];
}

export function encodeKey(key: DescriptorKey): string {
  const label = key.classLabel === 1 ? "+1" : "-1";
  const b64 = Buffer.from(key.text, "utf8").toString("base64url");
  return `${label}:${key.index}:${b64}`;
}

export function decodeKey(token: string): DescriptorKey {
  const parts = token.split(":");
  if (parts.length !== 3) throw new Error(`malformed descriptor key ${token}`);
  const classLabel = parts[0] === "+1" ? 1 : parts[0] === "-1" ? -1 : null;
  if (classLabel === null) throw new Error(`unknown class token in key ${token}`);
  const index = Number.parseInt(parts[1], 10);
  if (!Number.isInteger(index) || index < 0) {
    throw new Error(`bad index in descriptor key ${token}`);
  }
  const text = Buffer.from(parts[2], "base64url").toString("utf8");
  return { classLabel, index, text };
}

export function formatValue(v: number): string {
  if (!Number.isFinite(v)) throw new Error(`non-finite value ${v}`);
  return v.toPrecision(17);
}

export function writeSimilarityCsv(table: SimilarityTable, path: string): void {
  const lines: string[] = [];
  lines.push(["image_id", "label", ...table.keys.map(encodeKey)].join(","));
  table.imageIds.forEach((id, i) => {
    if (id.includes(",") || id.includes("\n")) {
      throw new Error(`image id may not contain ',' or newlines: ${id}`);
    }
    const label = table.labels[i] === 1 ? "+1" : "-1";
    lines.push([id, label, ...table.values[i].map(formatValue)].join(","));
  });
  fs.writeFileSync(path, lines.join("\n") + "\n", "utf8");
}

export function readSimilarityCsv(path: string): SimilarityTable {
  const lines = fs.readFileSync(path, "utf8").split("\n");
  if (lines.length && lines[lines.length - 1] === "") lines.pop();
  if (!lines.length) throw new Error(`${path}: empty file`);
  const header = lines[0].split(",");
  if (header[0] !== "image_id" || header[1] !== "label") {
    throw new Error(`${path}: bad header`);
  }
  const keys = header.slice(2).map(decodeKey);
  const imageIds: string[] = [];
  const labels: (1 | -1)[] = [];
  const values: number[][] = [];
  for (let r = 1; r < lines.length; r++) {
    const fields = lines[r].split(",");
    if (fields.length !== keys.length + 2) {
      throw new Error(`${path}: line ${r + 1}: wrong field count`);
    }
    if (fields[1] !== "+1" && fields[1] !== "-1") {
      throw new Error(`${path}: line ${r + 1}: unknown label token ${fields[1]}`);
    }
    const row = fields.slice(2).map((tok) => {
      const v = Number.parseFloat(tok);
      if (!Number.isFinite(v)) throw new Error(`${path}: line ${r + 1}: bad value ${tok}`);
      return v;
    });
    imageIds.push(fields[0]);
    labels.push(fields[1] === "+1" ? 1 : -1);
    values.push(row);
  }
  return { imageIds, labels, keys, values };
}
