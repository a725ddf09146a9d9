/**
 * Sidecar CLI: produces similarity matrices from images + descriptor
 * sets, crops images by their segmentation masks, and renders plots from
 * the numeric pipeline's outputs.
 *
 *   embed --images DIR --descriptors FILE --output FILE
 *         [--model toy:256] [--masks DIR --margin 20] [--template "..{}.."]
 *   crop  --images DIR --masks DIR --output DIR [--margin 20]
 *   plot  --kind tsne|roc|nshot|shape-scatter --input FILE --output FILE
 *         [--seed 0] [--x col --y col]
 *
 * Exit codes: 0 ok, 1 input error. Diagnostics go to stderr only.
 */

import fs from "node:fs";
import path from "node:path";
import { pathToFileURL } from "node:url";

import { readDescriptorSets } from "./descriptors.js";
import { runEmbed } from "./embed.js";
import { cropImage, maskBboxWithMargin } from "./crop.js";
import { readNetpbm, writePgm } from "./pgm.js";
import { plotNshot, plotRoc, plotShapeScatter, plotTsne } from "./plot.js";

const DEFAULT_MODEL = "toy:256";

interface FlagSpec {
  required: string[];
  optional: string[];
}

function parseFlags(argv: string[], spec: FlagSpec): Map<string, string> {
  const known = new Set([...spec.required, ...spec.optional]);
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith("--")) throw new Error(`unexpected argument ${arg}`);
    const name = arg.slice(2);
    if (!known.has(name)) throw new Error(`unknown flag --${name}`);
    const value = argv[i + 1];
    if (value === undefined) throw new Error(`flag --${name} needs a value`);
    flags.set(name, value);
    i++;
  }
  for (const name of spec.required) {
    if (!flags.has(name)) throw new Error(`missing required flag --${name}`);
  }
  return flags;
}

function cmdEmbed(argv: string[]): void {
  const flags = parseFlags(argv, {
    required: ["images", "descriptors", "output"],
    optional: ["model", "masks", "margin", "template"],
  });
  const table = runEmbed({
    imageDir: flags.get("images")!,
    descriptorSets: readDescriptorSets(flags.get("descriptors")!),
    model: flags.get("model") ?? DEFAULT_MODEL,
    outputPath: flags.get("output")!,
    maskDir: flags.get("masks"),
    margin: flags.has("margin") ? parseIntFlag(flags, "margin") : undefined,
    template: flags.get("template"),
  });
  console.error(
    `embedded ${table.imageIds.length} images x ${table.keys.length} descriptors ` +
      `-> ${flags.get("output")}`
  );
}

function cmdCrop(argv: string[]): void {
  const flags = parseFlags(argv, {
    required: ["images", "masks", "output"],
    optional: ["margin"],
  });
  const margin = flags.has("margin") ? parseIntFlag(flags, "margin") : 20;
  const imageDir = flags.get("images")!;
  const maskDir = flags.get("masks")!;
  const outDir = flags.get("output")!;
  let count = 0;
  for (const rel of walkImages(imageDir)) {
    const image = readNetpbm(path.join(imageDir, rel));
    const maskPath = path.join(maskDir, rel);
    if (!fs.existsSync(maskPath)) throw new Error(`missing mask for ${rel}`);
    const mask = readNetpbm(maskPath);
    if (mask.width !== image.width || mask.height !== image.height) {
      throw new Error(`mask size mismatch for ${rel}`);
    }
    const cropped = cropImage(image, maskBboxWithMargin(mask, margin));
    const target = path.join(outDir, rel);
    fs.mkdirSync(path.dirname(target), { recursive: true });
    writePgm(cropped, target);
    count++;
  }
  if (count === 0) throw new Error(`no images found under ${imageDir}`);
  console.error(`cropped ${count} images -> ${outDir}`);
}

function cmdPlot(argv: string[]): void {
  const flags = parseFlags(argv, {
    required: ["kind", "input", "output"],
    optional: ["seed", "x", "y"],
  });
  const kind = flags.get("kind")!;
  const input = flags.get("input")!;
  const output = flags.get("output")!;
  if (kind === "tsne") {
    plotTsne(input, output, flags.has("seed") ? parseIntFlag(flags, "seed") : 0);
  } else if (kind === "roc") {
    plotRoc(input, output);
  } else if (kind === "nshot") {
    plotNshot(input, output);
  } else if (kind === "shape-scatter") {
    plotShapeScatter(
      input,
      output,
      flags.get("x") ?? "roundness",
      flags.get("y") ?? "rectangularity"
    );
  } else {
    throw new Error(`unknown plot kind ${kind} (tsne, roc, nshot, shape-scatter)`);
  }
  console.error(`wrote ${output}`);
}

function parseIntFlag(flags: Map<string, string>, name: string): number {
  const v = Number.parseInt(flags.get(name)!, 10);
  if (!Number.isInteger(v)) throw new Error(`flag --${name} must be an integer`);
  return v;
}

function* walkImages(root: string): Generator<string> {
  const extensions = new Set([".pgm", ".ppm", ".pnm"]);
  const stack = [""];
  while (stack.length) {
    const rel = stack.pop()!;
    const entries = fs
      .readdirSync(path.join(root, rel), { withFileTypes: true })
      .sort((a, b) => a.name.localeCompare(b.name));
    for (const entry of entries) {
      const childRel = rel ? path.join(rel, entry.name) : entry.name;
      if (entry.isDirectory()) stack.push(childRel);
      else if (extensions.has(path.extname(entry.name).toLowerCase())) yield childRel;
    }
  }
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === "embed") cmdEmbed(rest);
    else if (command === "crop") cmdCrop(rest);
    else if (command === "plot") cmdPlot(rest);
    else {
      console.error("usage: descshot-sidecar <embed|crop|plot> [flags]");
      return 1;
    }
    return 0;
  } catch (err) {
    console.error(`descshot-sidecar ${command}: error: ${(err as Error).message}`);
    return 1;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
