/**
 * Turns a parsed grid into pixel data for each figure style.
 *
 * The scattered CSV points are first arranged on their coordinate
 * lattice (columns = first coordinate ascending, rows = second
 * coordinate descending so larger values sit at the top of the image).
 * Lattice holes and masked points render fully transparent.
 */

import { GridData, GridPoint } from "./csv";
import {
  Rgba,
  TRANSPARENT,
  divergingRedBlue,
  grayscale,
  phaseLightness,
} from "./color";
import { Image } from "./png";

export const STYLES = ["heatmap_re", "heatmap_im", "heatmap_abs",
                       "phase_lightness", "surface3d"] as const;
export type Style = (typeof STYLES)[number];

export interface RenderResult {
  image: Image;
  /** tEXt metadata embedded in the PNG */
  texts: Record<string, string>;
}

interface Lattice {
  columns: number;
  rows: number;
  /** row-major cells, row 0 = largest second coordinate */
  cells: (GridPoint | undefined)[];
  maxAbs: number;
  okCount: number;
}

function axisValues(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

function buildLattice(grid: GridData): Lattice {
  const xs = axisValues(grid.points.map((p) => p.x));
  const ys = axisValues(grid.points.map((p) => p.y));
  const xIndex = new Map(xs.map((v, i) => [v, i]));
  const yIndex = new Map(ys.map((v, i) => [v, i]));
  const columns = xs.length;
  const rows = ys.length;
  const cells = new Array<GridPoint | undefined>(columns * rows);
  let maxAbs = 0;
  let okCount = 0;
  for (const p of grid.points) {
    const row = rows - 1 - (yIndex.get(p.y) as number);
    cells[row * columns + (xIndex.get(p.x) as number)] = p;
    if (p.ok) {
      okCount += 1;
      maxAbs = Math.max(maxAbs, Math.hypot(p.re, p.im));
    }
  }
  return { columns, rows, cells, maxAbs, okCount };
}

function flatColor(point: GridPoint | undefined, style: Style,
                   maxAbs: number, maxRe: number, maxIm: number): Rgba {
  if (point === undefined || !point.ok) {
    return TRANSPARENT;
  }
  switch (style) {
    case "phase_lightness": {
      const magnitude = maxAbs > 0
          ? Math.hypot(point.re, point.im) / maxAbs : 0;
      return phaseLightness(Math.atan2(point.im, point.re), magnitude);
    }
    case "heatmap_re":
      return divergingRedBlue(maxRe > 0 ? point.re / maxRe : 0);
    case "heatmap_im":
      return divergingRedBlue(maxIm > 0 ? point.im / maxIm : 0);
    case "heatmap_abs":
      return grayscale(maxAbs > 0
          ? Math.hypot(point.re, point.im) / maxAbs : 0);
    default:
      throw new Error(`not a flat style: ${style}`);
  }
}

function putPixel(image: Image, x: number, y: number, color: Rgba): void {
  const at = (y * image.width + x) * 4;
  image.pixels[at] = color[0];
  image.pixels[at + 1] = color[1];
  image.pixels[at + 2] = color[2];
  image.pixels[at + 3] = color[3];
}

function renderFlat(lattice: Lattice, style: Style, scale: number): Image {
  let maxRe = 0;
  let maxIm = 0;
  for (const cell of lattice.cells) {
    if (cell !== undefined && cell.ok) {
      maxRe = Math.max(maxRe, Math.abs(cell.re));
      maxIm = Math.max(maxIm, Math.abs(cell.im));
    }
  }
  const image: Image = {
    width: lattice.columns * scale,
    height: lattice.rows * scale,
    pixels: new Uint8Array(lattice.columns * lattice.rows * scale * scale
                           * 4),
  };
  for (let row = 0; row < lattice.rows; row++) {
    for (let col = 0; col < lattice.columns; col++) {
      const color = flatColor(lattice.cells[row * lattice.columns + col],
                              style, lattice.maxAbs, maxRe, maxIm);
      for (let dy = 0; dy < scale; dy++) {
        for (let dx = 0; dx < scale; dx++) {
          putPixel(image, col * scale + dx, row * scale + dy, color);
        }
      }
    }
  }
  return image;
}

// oblique bar projection: row depth shifts right and up, bar height is
// the normalized magnitude, bar color the argument
const BAR_WIDTH = 4;
const DEPTH_SHIFT_X = 2;
const DEPTH_SHIFT_Y = 3;
const PEAK_HEIGHT = 80;
const MARGIN = 4;

function renderSurface(lattice: Lattice, scale: number): Image {
  const width = (lattice.columns * BAR_WIDTH
                 + lattice.rows * DEPTH_SHIFT_X + 2 * MARGIN) * scale;
  const height = (lattice.rows * DEPTH_SHIFT_Y + PEAK_HEIGHT + 2 * MARGIN)
      * scale;
  const image: Image = { width, height,
                         pixels: new Uint8Array(width * height * 4) };
  for (let row = 0; row < lattice.rows; row++) {
    const baseY = (MARGIN + PEAK_HEIGHT + row * DEPTH_SHIFT_Y) * scale;
    const shiftX = (MARGIN + (lattice.rows - 1 - row) * DEPTH_SHIFT_X)
        * scale;
    for (let col = 0; col < lattice.columns; col++) {
      const cell = lattice.cells[row * lattice.columns + col];
      if (cell === undefined || !cell.ok) {
        continue;
      }
      const magnitude = lattice.maxAbs > 0
          ? Math.hypot(cell.re, cell.im) / lattice.maxAbs : 0;
      const color = phaseLightness(Math.atan2(cell.im, cell.re), magnitude);
      const barTop = baseY - Math.round(magnitude * PEAK_HEIGHT * scale);
      for (let x = shiftX + col * BAR_WIDTH * scale;
           x < shiftX + (col + 1) * BAR_WIDTH * scale; x++) {
        for (let y = barTop; y <= baseY; y++) {
          putPixel(image, x, y, color);
        }
      }
    }
  }
  return image;
}

/** Render a grid in the requested style at an integer pixel scale. */
export function renderImage(grid: GridData, style: Style,
                            scale = 1): RenderResult {
  if (!STYLES.includes(style)) {
    throw new Error(`unknown style ${style}; expected one of `
                    + STYLES.join(", "));
  }
  if (!Number.isInteger(scale) || scale < 1) {
    throw new Error(`scale must be a positive integer, got ${scale}`);
  }
  const lattice = buildLattice(grid);
  const image = style === "surface3d"
      ? renderSurface(lattice, scale)
      : renderFlat(lattice, style, scale);
  const texts: Record<string, string> = {
    style,
    mode: grid.mode,
    normalization: `max|z| = ${lattice.maxAbs} over ${lattice.okCount} `
        + "unmasked cells; lightness = 1 - 0.5 * |z| / max|z|",
  };
  return { image, texts };
}
