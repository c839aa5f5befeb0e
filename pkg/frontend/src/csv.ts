/**
 * Reader for the distribution grid CSV artifacts.
 *
 * The files are self-describing: `#` comment lines carry the full
 * effective configuration as `key=value` pairs, followed by one header
 * row and the data block.  Section grids use columns
 * `x_minus,x_plus,re,im,ok`; base grids use `x,y,re,im,mask`.
 */

import * as fs from "node:fs";
import Papa from "papaparse";

export class CsvError extends Error {}

export type GridMode = "section" | "base";

export interface GridPoint {
  /** first grid coordinate (x_minus or x) */
  x: number;
  /** second grid coordinate (x_plus or y) */
  y: number;
  re: number;
  im: number;
  /** false for masked or failed points */
  ok: boolean;
}

export interface GridData {
  mode: GridMode;
  metadata: Record<string, string>;
  points: GridPoint[];
}

const SECTION_COLUMNS = ["x_minus", "x_plus", "re", "im", "ok"];
const BASE_COLUMNS = ["x", "y", "re", "im", "mask"];

function parseMetadata(lines: string[]): Record<string, string> {
  const meta: Record<string, string> = {};
  for (const line of lines) {
    const body = line.replace(/^#\s*/, "");
    const eq = body.indexOf("=");
    if (eq > 0) {
      meta[body.slice(0, eq).trim()] = body.slice(eq + 1).trim();
    }
  }
  return meta;
}

/** Parse a grid CSV from text; throws CsvError on anything malformed. */
export function parseGrid(text: string): GridData {
  const lines = text.split(/\r?\n/);
  const commentLines: string[] = [];
  const dataLines: string[] = [];
  for (const line of lines) {
    if (line.startsWith("#")) {
      commentLines.push(line);
    } else if (line.trim() !== "") {
      dataLines.push(line);
    }
  }
  if (dataLines.length < 1) {
    throw new CsvError("no header row found");
  }

  const header = dataLines[0].split(",").map((c) => c.trim());
  let mode: GridMode;
  if (SECTION_COLUMNS.every((c, i) => header[i] === c)
      && header.length === SECTION_COLUMNS.length) {
    mode = "section";
  } else if (BASE_COLUMNS.every((c, i) => header[i] === c)
      && header.length === BASE_COLUMNS.length) {
    mode = "base";
  } else {
    throw new CsvError(`unrecognized grid header: ${dataLines[0]}`);
  }

  if (dataLines.length < 2) {
    throw new CsvError("grid has no data rows");
  }
  const parsed = Papa.parse<number[]>(dataLines.slice(1).join("\n"), {
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new CsvError(`row ${first.row}: ${first.message}`);
  }

  const points: GridPoint[] = [];
  for (const row of parsed.data) {
    if (row.length !== 5 || row.some(
        (v) => typeof v !== "number" || !Number.isFinite(v))) {
      throw new CsvError(`malformed data row: ${JSON.stringify(row)}`);
    }
    const flag = row[4];
    if (flag !== 0 && flag !== 1) {
      throw new CsvError(`mask flag must be 0 or 1, got ${flag}`);
    }
    points.push({ x: row[0], y: row[1], re: row[2], im: row[3],
                  ok: flag === 1 });
  }
  return { mode, metadata: parseMetadata(commentLines), points };
}

/** Read and parse a grid CSV file. */
export function readGrid(path: string): GridData {
  let text: string;
  try {
    text = fs.readFileSync(path, "utf-8");
  } catch (err) {
    throw new CsvError(`cannot read ${path}: ${(err as Error).message}`);
  }
  return parseGrid(text);
}
