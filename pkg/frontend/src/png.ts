/**
 * PNG backend: a dependency-free rasterizer (lines, circle outlines) and a
 * minimal 8-bit RGB PNG encoder (filter 0, zlib via node's built-in).
 * Output is deterministic for a fixed node/zlib version; byte-golden tests
 * belong to the SVG backend.
 */

import { deflateSync } from "node:zlib";

import { Marker, Polyline, Scene } from "./scene";

type Rgb = [number, number, number];

function parseColour(colour: string): Rgb {
  const hex = colour.replace("#", "");
  return [
    parseInt(hex.slice(0, 2), 16),
    parseInt(hex.slice(2, 4), 16),
    parseInt(hex.slice(4, 6), 16),
  ];
}

class Raster {
  readonly data: Uint8Array;

  constructor(readonly width: number, readonly height: number) {
    this.data = new Uint8Array(width * height * 3).fill(255);
  }

  set(x: number, y: number, rgb: Rgb): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const k = (y * this.width + x) * 3;
    this.data[k] = rgb[0];
    this.data[k + 1] = rgb[1];
    this.data[k + 2] = rgb[2];
  }

  /** Bresenham segment with a square pen of the given half-width. */
  line(x0: number, y0: number, x1: number, y1: number, rgb: Rgb, pen: number): void {
    let ax = Math.round(x0);
    let ay = Math.round(y0);
    const bx = Math.round(x1);
    const by = Math.round(y1);
    const dx = Math.abs(bx - ax);
    const dy = -Math.abs(by - ay);
    const sx = ax < bx ? 1 : -1;
    const sy = ay < by ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      for (let px = -pen; px <= pen; px += 1) {
        for (let py = -pen; py <= pen; py += 1) {
          this.set(ax + px, ay + py, rgb);
        }
      }
      if (ax === bx && ay === by) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        ax += sx;
      }
      if (e2 <= dx) {
        err += dx;
        ay += sy;
      }
    }
  }

  polyline(line: Polyline): void {
    const rgb = parseColour(line.colour);
    const pen = line.width > 1 ? 1 : 0;
    for (let k = 0; k + 1 < line.points.length; k += 1) {
      this.line(
        line.points[k].x, line.points[k].y,
        line.points[k + 1].x, line.points[k + 1].y,
        rgb, pen
      );
    }
  }

  /** Open circle: white disc with a dark ring. */
  marker(marker: Marker): void {
    const cx = marker.at.x;
    const cy = marker.at.y;
    const r = marker.radius;
    for (let y = Math.floor(cy - r - 2); y <= Math.ceil(cy + r + 2); y += 1) {
      for (let x = Math.floor(cx - r - 2); x <= Math.ceil(cx + r + 2); x += 1) {
        const dist = Math.hypot(x - cx, y - cy);
        if (dist <= r - 0.75) {
          this.set(x, y, [255, 255, 255]);
        } else if (Math.abs(dist - r) <= 0.75) {
          this.set(x, y, [0, 0, 0]);
        }
      }
    }
  }
}

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n += 1) {
    let c = n;
    for (let k = 0; k < 8; k += 1) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(buf: Uint8Array): number {
  let c = 0xffffffff;
  for (const byte of buf) {
    c = CRC_TABLE[(c ^ byte) & 0xff] ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, payload: Uint8Array): Buffer {
  const head = Buffer.alloc(4);
  head.writeUInt32BE(payload.length, 0);
  const body = Buffer.concat([Buffer.from(type, "ascii"), Buffer.from(payload)]);
  const crc = Buffer.alloc(4);
  crc.writeUInt32BE(crc32(body), 0);
  return Buffer.concat([head, body, crc]);
}

export function encodePng(rgb: Uint8Array, width: number, height: number): Buffer {
  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(width, 0);
  ihdr.writeUInt32BE(height, 4);
  ihdr[8] = 8;   // bit depth
  ihdr[9] = 2;   // colour type: truecolour
  const raw = Buffer.alloc(height * (1 + width * 3));
  for (let y = 0; y < height; y += 1) {
    raw[y * (1 + width * 3)] = 0; // filter 0
    raw.set(rgb.subarray(y * width * 3, (y + 1) * width * 3), y * (1 + width * 3) + 1);
  }
  return Buffer.concat([
    Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
    chunk("IHDR", ihdr),
    chunk("IDAT", deflateSync(raw, { level: 9 })),
    chunk("IEND", new Uint8Array(0)),
  ]);
}

export function sceneToPng(scene: Scene): Buffer {
  const raster = new Raster(scene.width, scene.height);
  for (const flow of scene.flows) raster.polyline(flow);
  for (const path of scene.paths) raster.polyline(path);
  const [a, b, c] = scene.triangle;
  raster.polyline({ points: [a, b, c, a], colour: "#333333", width: 1.5 });
  for (const marker of scene.markers) raster.marker(marker);
  return encodePng(raster.data, scene.width, scene.height);
}
