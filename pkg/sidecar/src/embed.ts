/**
 * EmbedJob: images + descriptor sets -> similarity matrix CSV.
 *
 * The image directory holds one subdirectory per class, named exactly
 * like a descriptor set's class_name; the subdirectory supplies each
 * image's label. Image ids are `<class_dir>/<file stem>`. Columns follow
 * descriptor-set order with the positive class first; the column index is
 * the descriptor's position within its class block. With a crop spec
 * (mask directory + margin), every image is cropped to its mask's
 * bounding box plus margin before embedding; masks mirror the image
 * directory layout.
 */

import fs from "node:fs";
import path from "node:path";

import { DescriptorSet } from "./descriptors.js";
import { createFeaturizer, similarity } from "./features.js";
import { cropImage, maskBboxWithMargin } from "./crop.js";
import { GrayImage, readNetpbm } from "./pgm.js";
import { DescriptorKey, SimilarityTable, writeSimilarityCsv } from "./matrix.js";

export interface EmbedJob {
  imageDir: string;
  descriptorSets: DescriptorSet[];
  model: string;
  outputPath: string;
  maskDir?: string;
  margin?: number;
  template?: string; // e.g. "a photo of {}"
}

const IMAGE_EXTENSIONS = new Set([".pgm", ".ppm", ".pnm"]);

export function runEmbed(job: EmbedJob): SimilarityTable {
  const featurizer = createFeaturizer(job.model);
  const classDirs = classDirectories(job);
  const columns = orderedColumns(job.descriptorSets);

  const textVectors = columns.map((c) =>
    featurizer.textVector(applyTemplate(job.template, c.key.text))
  );

  const imageIds: string[] = [];
  const labels: (1 | -1)[] = [];
  const values: number[][] = [];
  for (const { dir, label } of classDirs) {
    const files = fs
      .readdirSync(path.join(job.imageDir, dir))
      .filter((f) => IMAGE_EXTENSIONS.has(path.extname(f).toLowerCase()))
      .sort();
    for (const file of files) {
      const imagePath = path.join(job.imageDir, dir, file);
      let image: GrayImage;
      try {
        image = readNetpbm(imagePath);
      } catch (err) {
        throw new Error(`undecodable image ${imagePath}: ${(err as Error).message}`);
      }
      if (job.maskDir !== undefined) {
        image = cropToMask(image, job, dir, file);
      }
      const vec = featurizer.imageVector(image);
      imageIds.push(`${dir}/${path.parse(file).name}`);
      labels.push(label);
      values.push(textVectors.map((t) => similarity(vec, t)));
    }
  }
  if (imageIds.length === 0) {
    throw new Error(`no readable images under ${job.imageDir}`);
  }

  const table: SimilarityTable = {
    imageIds,
    labels,
    keys: columns.map((c) => c.key),
    values,
  };
  writeSimilarityCsv(table, job.outputPath);
  return table;
}

function cropToMask(
  image: GrayImage,
  job: EmbedJob,
  dir: string,
  file: string
): GrayImage {
  const maskPath = path.join(job.maskDir!, dir, file);
  if (!fs.existsSync(maskPath)) {
    throw new Error(`missing mask for ${dir}/${file} under ${job.maskDir}`);
  }
  const mask = readNetpbm(maskPath);
  if (mask.width !== image.width || mask.height !== image.height) {
    throw new Error(
      `mask size ${mask.width}x${mask.height} does not match image ` +
        `${image.width}x${image.height} for ${dir}/${file}`
    );
  }
  return cropImage(image, maskBboxWithMargin(mask, job.margin ?? 0));
}

function classDirectories(job: EmbedJob): { dir: string; label: 1 | -1 }[] {
  const byName = new Map<string, 1 | -1>();
  for (const set of job.descriptorSets) {
    if (!byName.has(set.className)) byName.set(set.className, set.classLabel);
  }
  const subdirs = fs
    .readdirSync(job.imageDir, { withFileTypes: true })
    .filter((e) => e.isDirectory())
    .map((e) => e.name)
    .sort();
  const matched = subdirs.filter((d) => byName.has(d));
  if (matched.length === 0) {
    throw new Error(
      `no class subdirectories under ${job.imageDir} match the descriptor ` +
        `sets' class names (${[...byName.keys()].join(", ")})`
    );
  }
  // positive class first, mirroring the column order
  matched.sort((a, b) => byName.get(b)! - byName.get(a)! || a.localeCompare(b));
  return matched.map((dir) => ({ dir, label: byName.get(dir)! }));
}

function orderedColumns(
  sets: DescriptorSet[]
): { key: DescriptorKey; set: DescriptorSet }[] {
  const columns: { key: DescriptorKey; set: DescriptorSet }[] = [];
  for (const classLabel of [1, -1] as const) {
    let index = 0;
    for (const set of sets) {
      if (set.classLabel !== classLabel) continue;
      for (const text of set.descriptors) {
        columns.push({ key: { classLabel, index, text }, set });
        index += 1;
      }
    }
  }
  if (!columns.some((c) => c.key.classLabel === 1)) {
    throw new Error("descriptor sets contain no positive class");
  }
  if (!columns.some((c) => c.key.classLabel === -1)) {
    throw new Error("descriptor sets contain no negative class");
  }
  return columns;
}

function applyTemplate(template: string | undefined, text: string): string {
  if (!template) return text;
  if (!template.includes("{}")) {
    throw new Error(`template must contain a {} placeholder: "${template}"`);
  }
  return template.replaceAll("{}", text);
}
