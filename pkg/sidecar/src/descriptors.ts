/**
 * Descriptor-set JSON (the same format the numeric pipeline reads):
 * a top-level array of {set_id, class_label, class_name, descriptors,
 * provenance} objects with class_label 1 or -1.
 */

import fs from "node:fs";

export interface DescriptorSet {
  setId: string;
  classLabel: 1 | -1;
  className: string;
  descriptors: string[];
  provenance: string;
}

export function normalizeDescriptor(text: string): string {
  return text.trim().toLowerCase();
}

export function readDescriptorSets(path: string): DescriptorSet[] {
  const payload = JSON.parse(fs.readFileSync(path, "utf8"));
  if (!Array.isArray(payload)) {
    throw new Error(`${path}: top level must be an array of descriptor sets`);
  }
  return payload.map((entry, i) => {
    if (typeof entry !== "object" || entry === null) {
      throw new Error(`${path}: entry ${i}: expected an object`);
    }
    const classLabel = (entry as Record<string, unknown>).class_label;
    if (classLabel !== 1 && classLabel !== -1) {
      throw new Error(`${path}: entry ${i}: class_label must be 1 or -1`);
    }
    const rawDescriptors = (entry as Record<string, unknown>).descriptors;
    if (!Array.isArray(rawDescriptors) || rawDescriptors.length === 0) {
      throw new Error(`${path}: entry ${i}: descriptors must be a non-empty list`);
    }
    const descriptors = rawDescriptors.map((d) => {
      if (typeof d !== "string" || d.trim() === "") {
        throw new Error(`${path}: entry ${i}: empty or non-string descriptor`);
      }
      return d.trim();
    });
    const seen = new Set<string>();
    for (const d of descriptors) {
      const norm = normalizeDescriptor(d);
      if (seen.has(norm)) {
        throw new Error(`${path}: entry ${i}: duplicate descriptor "${d}"`);
      }
      seen.add(norm);
    }
    const rec = entry as Record<string, unknown>;
    return {
      setId: String(rec.set_id ?? `set-${i}`),
      classLabel,
      className: String(rec.class_name ?? ""),
      descriptors,
      provenance: String(rec.provenance ?? ""),
    };
  });
}
