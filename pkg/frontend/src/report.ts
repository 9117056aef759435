/**
 * Reader for the engine's fixed-point JSON report: `d`, `c`, and `records`
 * whose `point` fields are full-precision colour-major flat coordinates.
 */

import { Triple } from "./barycentric";
import { SchemaError } from "./csv";

export interface FixedPointRecord {
  point: number[];
  classification: string;
  spectral_radius: number;
  orbit_id: number;
}

export interface FixedPointReport {
  d: number;
  c: number;
  records: FixedPointRecord[];
}

export function parseFixedPointReport(text: string, source = "<json>"): FixedPointReport {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`${source}: not valid JSON (${(err as Error).message})`);
  }
  const obj = raw as Partial<FixedPointReport>;
  if (typeof obj.d !== "number" || typeof obj.c !== "number" || !Array.isArray(obj.records)) {
    throw new SchemaError(`${source}: expected keys d, c, records`);
  }
  for (const rec of obj.records) {
    if (!Array.isArray(rec.point) || rec.point.length !== obj.d * obj.c) {
      throw new SchemaError(`${source}: record point length must be d*c = ${obj.d * obj.c}`);
    }
  }
  return obj as FixedPointReport;
}

/** The selected colour's triple of one record; the report must have d = 3. */
export function markerTriple(report: FixedPointReport, rec: FixedPointRecord, colour: number): Triple {
  if (report.d !== 3) {
    throw new SchemaError(`ternary projection requires d=3, report has d=${report.d}`);
  }
  if (colour < 1 || colour > report.c) {
    throw new SchemaError(`colour ${colour} out of range (report has c=${report.c})`);
  }
  const base = (colour - 1) * 3;
  return [rec.point[base], rec.point[base + 1], rec.point[base + 2]];
}
