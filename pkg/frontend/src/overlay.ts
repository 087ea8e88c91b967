/** Build SVG markup for a click-seeded trajectory, appended on top of the
 *  server-rendered portrait. Geometry comes from the portrait's own data-*
 *  attributes so overlay curves land exactly where a server rerender would
 *  put them.
 */

import type { TrajectoryDict } from "./api.js";
import type { PlotGeometry } from "./transform.js";
import { phaseToPixel } from "./transform.js";

/** Match the server's coordinate formatting: 3 decimals, trimmed, no "-0". */
export function px(value: number): string {
  let s = value.toFixed(3);
  if (s.includes(".")) {
    s = s.replace(/0+$/, "").replace(/\.$/, "");
  }
  return s === "-0" ? "0" : s;
}

const MARKER_RADIUS = 4;
const CROSS_ARM = 4;

function esc(value: string): string {
  return value.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/"/g, "&quot;");
}

function startMarker(x: number, y: number, color: string): string {
  return (
    `<circle class="seeded-start" cx="${px(x)}" cy="${px(y)}" ` +
    `r="${MARKER_RADIUS}" fill="${esc(color)}"/>`
  );
}

function endMarker(x: number, y: number, color: string): string {
  const d =
    `M ${px(x - CROSS_ARM)} ${px(y - CROSS_ARM)} L ${px(x + CROSS_ARM)} ${px(y + CROSS_ARM)} ` +
    `M ${px(x - CROSS_ARM)} ${px(y + CROSS_ARM)} L ${px(x + CROSS_ARM)} ${px(y - CROSS_ARM)}`;
  return `<path class="seeded-end" d="${d}" stroke="${esc(color)}" stroke-width="2" fill="none"/>`;
}

/**
 * Render one trajectory as an SVG fragment.
 *
 * A run that never leaves its starting pixel (an equilibrium seed) draws as
 * a single dot. A failed run draws dashed red up to the abort point.
 */
export function trajectoryOverlay(
  geom: PlotGeometry,
  traj: TrajectoryDict,
  color = "#d62728",
): string {
  const pts = traj.points.map(([, vC, nD]) => phaseToPixel(geom, vC, nD));
  if (pts.length === 0) return "";

  const first = pts[0]!;
  const failed = traj.status !== "ok";
  const stroke = failed ? "#d62728" : color;

  const moved = pts.some(
    (p) => Math.abs(p.x - first.x) > 0.5 || Math.abs(p.y - first.y) > 0.5,
  );
  if (!moved) {
    return (
      `<g class="seeded-trajectory seeded-dot">` +
      `<circle cx="${px(first.x)}" cy="${px(first.y)}" r="${MARKER_RADIUS}" ` +
      `fill="${esc(stroke)}"/>` +
      `</g>`
    );
  }

  const d =
    `M ${px(first.x)} ${px(first.y)} ` +
    pts
      .slice(1)
      .map((p) => `L ${px(p.x)} ${px(p.y)}`)
      .join(" ");
  const dash = failed ? ` stroke-dasharray="6 4"` : "";
  const cls = failed ? "seeded-trajectory seeded-failed" : "seeded-trajectory";
  const last = pts[pts.length - 1]!;
  return (
    `<g class="${cls}">` +
    `<path d="${d}" stroke="${esc(stroke)}" stroke-width="2" fill="none"${dash}/>` +
    startMarker(first.x, first.y, stroke) +
    endMarker(last.x, last.y, stroke) +
    `</g>`
  );
}
