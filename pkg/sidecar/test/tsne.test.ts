import { describe, expect, it } from "vitest";

import { tsne } from "../dist/tsne.js";
import { mulberry32 } from "./helpers.js";

function clusters(n: number, gap: number): { data: number[][]; labels: number[] } {
  const random = mulberry32(5);
  const data: number[][] = [];
  const labels: number[] = [];
  for (let i = 0; i < n; i++) {
    const cls = i < n / 2 ? 0 : 1;
    data.push([
      cls * gap + 0.3 * random(),
      0.3 * random(),
      0.3 * random(),
    ]);
    labels.push(cls);
  }
  return { data, labels };
}

describe("tsne", () => {
  it("is deterministic given a seed", () => {
    const { data } = clusters(20, 5);
    const a = tsne(data, { seed: 9, iterations: 150 });
    const b = tsne(data, { seed: 9, iterations: 150 });
    expect(a).toEqual(b);
  });

  it("returns finite 2-D points", () => {
    const { data } = clusters(14, 2);
    const out = tsne(data, { iterations: 120 });
    expect(out.length).toBe(14);
    for (const [x, y] of out) {
      expect(Number.isFinite(x)).toBe(true);
      expect(Number.isFinite(y)).toBe(true);
    }
  });

  it("separates well-separated clusters", () => {
    const { data, labels } = clusters(24, 10);
    const out = tsne(data, { seed: 1, iterations: 300 });
    const centroid = (cls: number) => {
      const pts = out.filter((_, i) => labels[i] === cls);
      return [
        pts.reduce((s, p) => s + p[0], 0) / pts.length,
        pts.reduce((s, p) => s + p[1], 0) / pts.length,
      ];
    };
    const [a, b] = [centroid(0), centroid(1)];
    const between = Math.hypot(a[0] - b[0], a[1] - b[1]);
    // mean within-cluster spread
    let spread = 0;
    out.forEach((p, i) => {
      const c = labels[i] === 0 ? a : b;
      spread += Math.hypot(p[0] - c[0], p[1] - c[1]);
    });
    spread /= out.length;
    expect(between).toBeGreaterThan(2 * spread);
  });

  it("rejects degenerate input", () => {
    expect(() => tsne([[1, 2]])).toThrow(/at least 2/);
  });
});
