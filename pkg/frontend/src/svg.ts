/** SVG backend: fixed float formatting, no timestamps, stable output. */

import { Marker, Polyline, Scene } from "./scene";

function fmt(v: number): string {
  return v.toFixed(2);
}

function polylineTag(line: Polyline): string {
  const points = line.points.map((p) => `${fmt(p.x)},${fmt(p.y)}`).join(" ");
  return `<polyline points="${points}" fill="none" stroke="${line.colour}" stroke-width="${line.width}"/>`;
}

function markerTag(marker: Marker): string {
  return (
    `<circle cx="${fmt(marker.at.x)}" cy="${fmt(marker.at.y)}" r="${marker.radius}" ` +
    `fill="white" stroke="black" stroke-width="1.5"/>`
  );
}

export function sceneToSvg(scene: Scene): string {
  const [a, b, c] = scene.triangle;
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" height="${scene.height}" ` +
      `viewBox="0 0 ${scene.width} ${scene.height}">`,
    `<rect width="${scene.width}" height="${scene.height}" fill="white"/>`,
    ...scene.flows.map(polylineTag),
    ...scene.paths.map(polylineTag),
    `<path d="M ${fmt(a.x)} ${fmt(a.y)} L ${fmt(b.x)} ${fmt(b.y)} L ${fmt(c.x)} ${fmt(c.y)} Z" ` +
      `fill="none" stroke="#333333" stroke-width="1.5"/>`,
    ...scene.markers.map(markerTag),
    `</svg>`,
  ];
  return parts.join("\n") + "\n";
}
