/**
 * Plot kinds over the numeric pipeline's outputs:
 *   tsne          — feature-vector CSV (similarity-matrix format) -> 2D
 *                   embedding scatter colored by class
 *   roc           — fpr,tpr,cutoff CSV -> staircase curve with diagonal
 *   nshot         — per-n means CSV -> metric curves and kept-count curves
 *   shape-scatter — any headed CSV + two column names -> scatter
 * All plots are written as standalone SVG files.
 */

import fs from "node:fs";

import { readSimilarityCsv } from "./matrix.js";
import { parseCsv } from "./csv.js";
import { renderChart, Series } from "./svg.js";
import { tsne } from "./tsne.js";

const POSITIVE_COLOR = "#d62728";
const NEGATIVE_COLOR = "#1f77b4";
const PALETTE = ["#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];

export function plotTsne(inputPath: string, outputPath: string, seed = 0): void {
  const table = readSimilarityCsv(inputPath);
  if (table.imageIds.length < 2) {
    throw new Error("t-SNE needs at least 2 images");
  }
  const embedding = tsne(table.values, { seed });
  const pos: [number, number][] = [];
  const neg: [number, number][] = [];
  embedding.forEach((point, i) => {
    (table.labels[i] === 1 ? pos : neg).push([point[0], point[1]]);
  });
  const series: Series[] = [
    { label: "positive class", color: POSITIVE_COLOR, points: pos, kind: "scatter" },
    { label: "negative class", color: NEGATIVE_COLOR, points: neg, kind: "scatter" },
  ];
  fs.writeFileSync(
    outputPath,
    renderChart(series.filter((s) => s.points.length > 0), {
      title: "2D embedding of descriptor similarity vectors",
      xLabel: "dimension 1",
      yLabel: "dimension 2",
    })
  );
}

export function plotRoc(inputPath: string, outputPath: string): void {
  const rows = parseCsv(inputPath, ["fpr", "tpr", "cutoff"]);
  const curve: [number, number][] = rows.map((r) => [r.fpr, r.tpr]);
  const series: Series[] = [
    { label: "ROC", color: POSITIVE_COLOR, points: curve, kind: "line" },
    {
      label: "chance",
      color: "#999999",
      points: [
        [0, 0],
        [1, 1],
      ],
      kind: "line",
    },
  ];
  fs.writeFileSync(
    outputPath,
    renderChart(series, {
      title: "ROC curve",
      xLabel: "false positive rate",
      yLabel: "true positive rate",
    })
  );
}

export function plotNshot(inputPath: string, outputPath: string): void {
  const columns = [
    "n",
    "mean_accuracy",
    "mean_auc",
    "mean_kept_positive",
    "mean_kept_negative",
  ];
  const rows = parseCsv(inputPath, columns);
  const byN = (key: string): [number, number][] =>
    rows.map((r) => [r.n, r[key]] as [number, number]);
  const metrics: Series[] = [
    { label: "mean accuracy", color: PALETTE[0], points: byN("mean_accuracy"), kind: "line" },
    { label: "mean AUC", color: PALETTE[1], points: byN("mean_auc"), kind: "line" },
  ];
  const kept: Series[] = [
    { label: "kept positive", color: PALETTE[2], points: byN("mean_kept_positive"), kind: "line" },
    { label: "kept negative", color: PALETTE[3], points: byN("mean_kept_negative"), kind: "line" },
  ];
  const top = renderChart(metrics, {
    title: "n-shot classification performance",
    xLabel: "n (image pairs)",
    yLabel: "metric",
    height: 360,
  });
  const bottom = renderChart(kept, {
    title: "selected descriptors",
    xLabel: "n (image pairs)",
    yLabel: "mean kept count",
    height: 360,
  });
  fs.writeFileSync(outputPath, stackSvgs(top, bottom, 640, 360));
}

export function plotShapeScatter(
  inputPath: string,
  outputPath: string,
  xColumn: string,
  yColumn: string
): void {
  const rows = parseCsv(inputPath, [xColumn, yColumn]);
  const series: Series[] = [
    {
      label: `${yColumn} vs ${xColumn}`,
      color: NEGATIVE_COLOR,
      points: rows.map((r) => [r[xColumn], r[yColumn]] as [number, number]),
      kind: "scatter",
    },
  ];
  fs.writeFileSync(
    outputPath,
    renderChart(series, {
      title: `${yColumn} against ${xColumn}`,
      xLabel: xColumn,
      yLabel: yColumn,
    })
  );
}

function stackSvgs(top: string, bottom: string, width: number, panelHeight: number): string {
  const inner = (svg: string, y: number) =>
    `<g transform="translate(0 ${y})">` +
    svg.replace(/^<svg[^>]*>/, "").replace(/<\/svg>\s*$/, "") +
    "</g>";
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${panelHeight * 2}" viewBox="0 0 ${width} ${panelHeight * 2}" ` +
    `font-family="sans-serif" font-size="12">\n` +
    inner(top, 0) +
    "\n" +
    inner(bottom, panelHeight) +
    "\n</svg>\n"
  );
}
