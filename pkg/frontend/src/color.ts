/**
 * Figure color mappings.
 *
 * All functions are pure: a pixel color depends only on the complex
 * argument and the magnitude normalized to the per-image maximum, so
 * two grid cells with equal values always render identically.
 */

export type Rgba = [number, number, number, number];

const TWO_PI = 2 * Math.PI;

function clamp01(v: number): number {
  return v < 0 ? 0 : v > 1 ? 1 : v;
}

function channel(v: number): number {
  return Math.round(255 * clamp01(v));
}

/** Standard HSL to RGB, hue in degrees. */
export function hslToRgb(h: number, s: number, l: number): Rgba {
  const c = (1 - Math.abs(2 * l - 1)) * s;
  const hp = (((h % 360) + 360) % 360) / 60;
  const x = c * (1 - Math.abs((hp % 2) - 1));
  let rgb: [number, number, number];
  if (hp < 1) rgb = [c, x, 0];
  else if (hp < 2) rgb = [x, c, 0];
  else if (hp < 3) rgb = [0, c, x];
  else if (hp < 4) rgb = [0, x, c];
  else if (hp < 5) rgb = [x, 0, c];
  else rgb = [c, 0, x];
  const m = l - c / 2;
  return [channel(rgb[0] + m), channel(rgb[1] + m), channel(rgb[2] + m), 255];
}

/**
 * Phase-lightness mapping: the argument picks the hue on the standard
 * color wheel shifted by pi (argument 0 renders light blue, pi renders
 * red), and the normalized magnitude darkens the color, from white at
 * 0 to the pure hue at 1 (darker = larger).
 */
export function phaseLightness(arg: number, magnitude: number): Rgba {
  const hue = ((((arg + Math.PI) % TWO_PI) + TWO_PI) % TWO_PI)
      * (360 / TWO_PI);
  const lightness = 1 - 0.5 * clamp01(magnitude);
  return hslToRgb(hue, 1.0, lightness);
}

/**
 * Diverging ramp for signed parts, value pre-normalized to [-1, 1]:
 * blue for negative, white at zero, red for positive.
 */
export function divergingRedBlue(value: number): Rgba {
  const v = value < -1 ? -1 : value > 1 ? 1 : value;
  if (v >= 0) {
    return [255, channel(1 - v), channel(1 - v), 255];
  }
  return [channel(1 + v), channel(1 + v), 255, 255];
}

/** Grayscale ramp for magnitudes in [0, 1], darker = larger. */
export function grayscale(magnitude: number): Rgba {
  const g = channel(1 - clamp01(magnitude));
  return [g, g, g, 255];
}

export const TRANSPARENT: Rgba = [0, 0, 0, 0];
