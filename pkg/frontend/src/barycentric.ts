/**
 * Ternary (barycentric) projection for three-vertex colour proportions.
 *
 * Conventional layout: vertex 1 at the origin, vertex 2 at (1, 0),
 * vertex 3 at (1/2, sqrt(3)/2).  A proportion triple (b1, b2, b3) with
 * b1 + b2 + b3 = 1 maps to b1*V1 + b2*V2 + b3*V3, so the three unit
 * vectors land exactly on the triangle's vertices and the uniform triple
 * lands on the centroid.
 */

export interface Point2 {
  x: number;
  y: number;
}

export type Triple = [number, number, number];

export const VERTEX_1: Point2 = { x: 0, y: 0 };
export const VERTEX_2: Point2 = { x: 1, y: 0 };
export const VERTEX_3: Point2 = { x: 0.5, y: Math.sqrt(3) / 2 };

export function project(b: Triple): Point2 {
  return {
    x: b[0] * VERTEX_1.x + b[1] * VERTEX_2.x + b[2] * VERTEX_3.x,
    y: b[0] * VERTEX_1.y + b[1] * VERTEX_2.y + b[2] * VERTEX_3.y,
  };
}
