/**
 * Rendering pipeline: trajectory CSVs and a fixed-point report in, one
 * ternary figure out.  Read-only on its inputs; output bytes depend only
 * on input bytes and the renderer version.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { Triple } from "./barycentric";
import { colourTriples, parseTrajectoryCsv, SchemaError } from "./csv";
import { sceneToPng } from "./png";
import { markerTriple, parseFixedPointReport } from "./report";
import { buildScene, Scene } from "./scene";
import { sceneToSvg } from "./svg";

export interface RenderSpec {
  /** sample-path CSVs, drawn prominently */
  trajectories: string[];
  /** optional flow-curve CSVs, drawn as a light underlay */
  flows: string[];
  /** fixed-point report JSON; markers are omitted when absent */
  fixedPoints?: string;
  /** 1-based colour block to display */
  colour: number;
  /** output path; extension selects the format */
  out: string;
}

export interface RenderSummary {
  nPaths: number;
  nFlows: number;
  nMarkers: number;
  format: "svg" | "png";
}

function loadPaths(paths: string[], colour: number): Triple[][] {
  return paths.map((path) => {
    const table = parseTrajectoryCsv(readFileSync(path, "utf8"), path);
    return colourTriples(table, colour, path);
  });
}

export function buildSceneFromSpec(spec: RenderSpec): Scene {
  const samples = loadPaths(spec.trajectories, spec.colour);
  const flows = loadPaths(spec.flows, spec.colour);
  let markers: Triple[] = [];
  if (spec.fixedPoints !== undefined) {
    const report = parseFixedPointReport(readFileSync(spec.fixedPoints, "utf8"), spec.fixedPoints);
    markers = report.records.map((rec) => markerTriple(report, rec, spec.colour));
  }
  return buildScene(samples, flows, markers);
}

export function formatOf(out: string): "svg" | "png" {
  if (out.endsWith(".svg")) return "svg";
  if (out.endsWith(".png")) return "png";
  throw new SchemaError(`output path must end in .svg or .png, got "${out}"`);
}

export function render(spec: RenderSpec): RenderSummary {
  const format = formatOf(spec.out);
  const scene = buildSceneFromSpec(spec);
  if (format === "svg") {
    writeFileSync(spec.out, sceneToSvg(scene), "utf8");
  } else {
    writeFileSync(spec.out, sceneToPng(scene));
  }
  return {
    nPaths: scene.paths.length,
    nFlows: scene.flows.length,
    nMarkers: scene.markers.length,
    format,
  };
}
