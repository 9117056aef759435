/**
 * Reader for the engine's trajectory CSV contract: a `t` column, then
 * colour-major coordinate columns `x_<colour>_<vertex>` (1-based), then
 * `lyapunov`.  Leading `#` lines are config-hash comments and skipped.
 */

import { Triple } from "./barycentric";

export class SchemaError extends Error {}

export interface TrajectoryTable {
  /** column name -> values */
  columns: Map<string, number[]>;
  /** 1-based colour indices present */
  colours: number[];
  /** 1-based vertex indices present */
  vertices: number[];
  nRows: number;
}

const COORD = /^x_(\d+)_(\d+)$/;

export function parseTrajectoryCsv(text: string, source = "<csv>"): TrajectoryTable {
  const lines = text
    .split(/\r?\n/)
    .filter((line) => line.length > 0 && !line.startsWith("#"));
  if (lines.length < 2) {
    throw new SchemaError(`${source}: no data rows`);
  }
  const header = lines[0].split(",");
  if (header[0] !== "t") {
    throw new SchemaError(`${source}: first column must be "t", found "${header[0]}"`);
  }

  const colours = new Set<number>();
  const vertices = new Set<number>();
  for (const name of header.slice(1)) {
    const match = COORD.exec(name);
    if (match) {
      colours.add(Number(match[1]));
      vertices.add(Number(match[2]));
    } else if (name !== "lyapunov") {
      throw new SchemaError(
        `${source}: unexpected column "${name}" (expected t, x_<colour>_<vertex>, lyapunov)`
      );
    }
  }
  const sortedColours = [...colours].sort((a, b) => a - b);
  const sortedVertices = [...vertices].sort((a, b) => a - b);
  for (const i of sortedColours) {
    for (const u of sortedVertices) {
      if (!header.includes(`x_${i}_${u}`)) {
        throw new SchemaError(
          `${source}: missing column "x_${i}_${u}" (found: ${header.join(", ")})`
        );
      }
    }
  }

  const columns = new Map<string, number[]>(header.map((name) => [name, []]));
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(
        `${source}: row has ${cells.length} cells, header has ${header.length}`
      );
    }
    cells.forEach((cell, k) => {
      const value = Number(cell);
      if (!Number.isFinite(value)) {
        throw new SchemaError(`${source}: non-numeric cell "${cell}" in column "${header[k]}"`);
      }
      columns.get(header[k])!.push(value);
    });
  }

  return {
    columns,
    colours: sortedColours,
    vertices: sortedVertices,
    nRows: lines.length - 1,
  };
}

/** Extract the selected colour's proportion triples; requires d = 3. */
export function colourTriples(table: TrajectoryTable, colour: number, source = "<csv>"): Triple[] {
  if (table.vertices.length !== 3 || table.vertices.some((u, k) => u !== k + 1)) {
    throw new SchemaError(
      `${source}: ternary projection requires d=3 vertices, found ${table.vertices.length} (${table.vertices.join(", ")})`
    );
  }
  if (!table.colours.includes(colour)) {
    throw new SchemaError(
      `${source}: colour ${colour} not present (colours: ${table.colours.join(", ")})`
    );
  }
  const [c1, c2, c3] = [1, 2, 3].map((u) => table.columns.get(`x_${colour}_${u}`)!);
  const triples: Triple[] = [];
  for (let k = 0; k < table.nRows; k += 1) {
    triples.push([c1[k], c2[k], c3[k]]);
  }
  return triples;
}
