/**
 * Minimal PNG writer: 8-bit RGBA, filter 0 on every scanline, one IDAT
 * chunk, optional tEXt metadata.  Nothing here is figure-specific.
 */

import * as zlib from "node:zlib";

const SIGNATURE = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a,
                               0x0a]);

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(buf: Buffer): number {
  let c = 0xffffffff;
  for (const byte of buf) {
    c = CRC_TABLE[(c ^ byte) & 0xff] ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

function chunk(kind: string, body: Buffer): Buffer {
  const head = Buffer.concat([Buffer.from(kind, "ascii"), body]);
  const out = Buffer.alloc(head.length + 8);
  out.writeUInt32BE(body.length, 0);
  head.copy(out, 4);
  out.writeUInt32BE(crc32(head), head.length + 4);
  return out;
}

export interface Image {
  width: number;
  height: number;
  /** RGBA rows, top to bottom, 4 bytes per pixel */
  pixels: Uint8Array;
}

/** Encode an RGBA image, embedding `texts` as tEXt key/value chunks. */
export function encodePng(image: Image,
                          texts: Record<string, string> = {}): Buffer {
  const { width, height, pixels } = image;
  if (width < 1 || height < 1 || pixels.length !== width * height * 4) {
    throw new Error(`pixel buffer does not match ${width}x${height}`);
  }

  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(width, 0);
  ihdr.writeUInt32BE(height, 4);
  ihdr[8] = 8;   // bit depth
  ihdr[9] = 6;   // RGBA
  const parts = [SIGNATURE, chunk("IHDR", ihdr)];

  for (const [key, value] of Object.entries(texts)) {
    parts.push(chunk("tEXt", Buffer.concat([
      Buffer.from(key, "latin1"), Buffer.from([0]),
      Buffer.from(value, "latin1")])));
  }

  const stride = width * 4;
  const raw = Buffer.alloc((stride + 1) * height);
  for (let y = 0; y < height; y++) {
    raw[y * (stride + 1)] = 0;
    raw.set(pixels.subarray(y * stride, (y + 1) * stride),
            y * (stride + 1) + 1);
  }
  parts.push(chunk("IDAT", zlib.deflateSync(raw, { level: 9 })));
  parts.push(chunk("IEND", Buffer.alloc(0)));
  return Buffer.concat(parts);
}
