/** Pixel <-> phase-plane coordinate mapping.
 *
 *  The server embeds its plot geometry in the SVG root as data-* attributes
 *  so the client never re-derives layout. The N_d axis is logarithmic by
 *  default: pixel position is linear in ln(n_d).
 */

export interface PlotGeometry {
  plotX: number;
  plotY: number;
  plotWidth: number;
  plotHeight: number;
  vMin: number;
  vMax: number;
  nMin: number;
  nMax: number;
  logAxis: boolean;
}

function attr(root: Element, name: string): string {
  const value = root.getAttribute(name);
  if (value === null) throw new Error(`svg missing ${name}`);
  return value;
}

/** Read the geometry the renderer recorded on the <svg> element. */
export function geometryFromSvg(root: Element): PlotGeometry {
  return {
    plotX: Number(attr(root, "data-plot-x")),
    plotY: Number(attr(root, "data-plot-y")),
    plotWidth: Number(attr(root, "data-plot-width")),
    plotHeight: Number(attr(root, "data-plot-height")),
    vMin: Number(attr(root, "data-v-min")),
    vMax: Number(attr(root, "data-v-max")),
    nMin: Number(attr(root, "data-n-min")),
    nMax: Number(attr(root, "data-n-max")),
    logAxis: attr(root, "data-axis-scale") === "log",
  };
}

function nAxis(geom: PlotGeometry, n: number): number {
  return geom.logAxis ? Math.log(n) : n;
}

function nFromAxis(geom: PlotGeometry, coord: number): number {
  return geom.logAxis ? Math.exp(coord) : coord;
}

export function phaseToPixel(
  geom: PlotGeometry,
  vC: number,
  nD: number,
): { x: number; y: number } {
  const fx = (vC - geom.vMin) / (geom.vMax - geom.vMin);
  const lo = nAxis(geom, geom.nMin);
  const hi = nAxis(geom, geom.nMax);
  const fy = (nAxis(geom, nD) - lo) / (hi - lo);
  return {
    x: geom.plotX + fx * geom.plotWidth,
    // SVG y grows downward; phase coordinate grows upward
    y: geom.plotY + (1 - fy) * geom.plotHeight,
  };
}

export function pixelToPhase(
  geom: PlotGeometry,
  x: number,
  y: number,
): { vC: number; nD: number } {
  const fx = (x - geom.plotX) / geom.plotWidth;
  const fy = 1 - (y - geom.plotY) / geom.plotHeight;
  const lo = nAxis(geom, geom.nMin);
  const hi = nAxis(geom, geom.nMax);
  return {
    vC: geom.vMin + fx * (geom.vMax - geom.vMin),
    nD: nFromAxis(geom, lo + fy * (hi - lo)),
  };
}

/** True when the point lies inside the plot box (clicks elsewhere are ignored). */
export function insidePlot(geom: PlotGeometry, x: number, y: number): boolean {
  return (
    x >= geom.plotX &&
    x <= geom.plotX + geom.plotWidth &&
    y >= geom.plotY &&
    y <= geom.plotY + geom.plotHeight
  );
}
