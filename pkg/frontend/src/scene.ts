/**
 * Device-space scene shared by the SVG and PNG backends: the simplex
 * triangle, light flow-underlay polylines, sample-path polylines, and
 * open-circle markers at the fixed points.  All coordinates are rounded
 * to 1/100 pixel here so both backends are deterministic byte for byte.
 */

import { Point2, project, Triple, VERTEX_1, VERTEX_2, VERTEX_3 } from "./barycentric";

export const WIDTH = 640;
export const HEIGHT = 600;
export const MARGIN = 40;
const SIDE = WIDTH - 2 * MARGIN;

export const PATH_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
export const FLOW_COLOUR = "#c8c8c8";
export const EDGE_COLOUR = "#333333";
export const MARKER_RADIUS = 5;

export interface Polyline {
  points: Point2[];
  colour: string;
  width: number;
}

export interface Marker {
  at: Point2;
  radius: number;
}

export interface Scene {
  width: number;
  height: number;
  triangle: Point2[];
  flows: Polyline[];
  paths: Polyline[];
  markers: Marker[];
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}

export function toDevice(p: Point2): Point2 {
  return {
    x: round2(MARGIN + p.x * SIDE),
    y: round2(HEIGHT - MARGIN - p.y * SIDE),
  };
}

export function buildScene(
  samplePaths: Triple[][],
  flowPaths: Triple[][],
  markers: Triple[]
): Scene {
  return {
    width: WIDTH,
    height: HEIGHT,
    triangle: [VERTEX_1, VERTEX_2, VERTEX_3].map((v) => toDevice(v)),
    flows: flowPaths.map((triples) => ({
      points: triples.map((b) => toDevice(project(b))),
      colour: FLOW_COLOUR,
      width: 1,
    })),
    paths: samplePaths.map((triples, k) => ({
      points: triples.map((b) => toDevice(project(b))),
      colour: PATH_PALETTE[k % PATH_PALETTE.length],
      width: 1.5,
    })),
    markers: markers.map((b) => ({ at: toDevice(project(b)), radius: MARKER_RADIUS })),
  };
}
