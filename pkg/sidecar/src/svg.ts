/** Minimal SVG chart rendering (no DOM, no dependencies). */

export interface Series {
  label: string;
  color: string;
  points: [number, number][];
  kind: "line" | "scatter";
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  width?: number;
  height?: number;
}

const MARGIN = { top: 40, right: 24, bottom: 48, left: 60 };

export function renderChart(series: Series[], options: ChartOptions): string {
  const width = options.width ?? 640;
  const height = options.height ?? 480;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const xs = series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = series.flatMap((s) => s.points.map((p) => p[1]));
  if (xs.length === 0) throw new Error("nothing to plot");
  const [xMin, xMax] = pad(Math.min(...xs), Math.max(...xs));
  const [yMin, yMax] = pad(Math.min(...ys), Math.max(...ys));

  const sx = (x: number) => MARGIN.left + ((x - xMin) / (xMax - xMin)) * plotW;
  const sy = (y: number) => MARGIN.top + plotH - ((y - yMin) / (yMax - yMin)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${width / 2}" y="20" text-anchor="middle" font-size="15">` +
      `${escapeXml(options.title)}</text>`
  );

  // axes with ticks
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" ` +
      `fill="none" stroke="#333"/>`
  );
  for (const frac of [0, 0.25, 0.5, 0.75, 1]) {
    const xv = xMin + frac * (xMax - xMin);
    const yv = yMin + frac * (yMax - yMin);
    const xPix = sx(xv);
    const yPix = sy(yv);
    parts.push(
      `<line x1="${xPix}" y1="${MARGIN.top + plotH}" x2="${xPix}" ` +
        `y2="${MARGIN.top + plotH + 5}" stroke="#333"/>`,
      `<text x="${xPix}" y="${MARGIN.top + plotH + 18}" text-anchor="middle">` +
        `${tickLabel(xv)}</text>`,
      `<line x1="${MARGIN.left - 5}" y1="${yPix}" x2="${MARGIN.left}" ` +
        `y2="${yPix}" stroke="#333"/>`,
      `<text x="${MARGIN.left - 8}" y="${yPix + 4}" text-anchor="end">` +
        `${tickLabel(yv)}</text>`
    );
  }
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 10}" text-anchor="middle">` +
      `${escapeXml(options.xLabel)}</text>`,
    `<text x="16" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${MARGIN.top + plotH / 2})">` +
      `${escapeXml(options.yLabel)}</text>`
  );

  series.forEach((s, idx) => {
    if (s.kind === "line") {
      const path = s.points
        .map((p, i) => `${i === 0 ? "M" : "L"}${sx(p[0])},${sy(p[1])}`)
        .join(" ");
      parts.push(`<path d="${path}" fill="none" stroke="${s.color}" stroke-width="2"/>`);
    } else {
      for (const [x, y] of s.points) {
        parts.push(
          `<circle cx="${sx(x)}" cy="${sy(y)}" r="3" fill="${s.color}" ` +
            `fill-opacity="0.75"/>`
        );
      }
    }
    // legend entry
    const ly = MARGIN.top + 14 + 16 * idx;
    parts.push(
      `<rect x="${width - MARGIN.right - 130}" y="${ly - 9}" width="10" height="10" ` +
        `fill="${s.color}"/>`,
      `<text x="${width - MARGIN.right - 115}" y="${ly}">${escapeXml(s.label)}</text>`
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function pad(min: number, max: number): [number, number] {
  if (min === max) return [min - 1, max + 1];
  const gap = (max - min) * 0.05;
  return [min - gap, max + gap];
}

function tickLabel(v: number): string {
  const rounded = Math.abs(v) < 1e-10 ? 0 : v;
  return Math.abs(rounded) >= 1000 || (rounded !== 0 && Math.abs(rounded) < 0.01)
    ? rounded.toExponential(1)
    : String(Math.round(rounded * 100) / 100);
}

function escapeXml(s: string): string {
  return s
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}
