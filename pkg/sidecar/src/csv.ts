/** Simple headed-CSV parsing for the numeric pipeline's report files. */

import fs from "node:fs";

export function parseCsv(
  path: string,
  numericColumns: string[]
): Record<string, number>[] {
  const lines = fs.readFileSync(path, "utf8").split("\n");
  if (lines.length && lines[lines.length - 1] === "") lines.pop();
  if (lines.length < 1) throw new Error(`${path}: empty file`);
  const header = lines[0].split(",");
  const indices = new Map<string, number>();
  for (const column of numericColumns) {
    const idx = header.indexOf(column);
    if (idx < 0) {
      throw new Error(
        `${path}: missing column "${column}" (found: ${header.join(", ")})`
      );
    }
    indices.set(column, idx);
  }
  return lines.slice(1).map((line, r) => {
    const fields = line.split(",");
    const row: Record<string, number> = {};
    for (const [column, idx] of indices) {
      const v = Number.parseFloat(fields[idx]);
      if (!Number.isFinite(v)) {
        throw new Error(`${path}: line ${r + 2}: column ${column}: bad value`);
      }
      row[column] = v;
    }
    return row;
  });
}
