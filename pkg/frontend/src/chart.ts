import { CURVE_BALANCED, CURVE_BOUND, CURVE_UNFILTERED } from "./colors";
import type { HistoryPoint } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface ChartGeometry {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export const DEFAULT_GEOMETRY: ChartGeometry = {
  width: 460,
  height: 260,
  left: 44,
  right: 14,
  top: 12,
  bottom: 28,
};

export function xForT(t: number, tMax: number, geom: ChartGeometry): number {
  const inner = geom.width - geom.left - geom.right;
  return geom.left + (t / Math.max(tMax, 1)) * inner;
}

/** Map a 0..1 share onto the y axis (0% at the bottom, 100% at the top). */
export function yForPct(pct: number, geom: ChartGeometry): number {
  const inner = geom.height - geom.top - geom.bottom;
  return geom.top + (1 - pct) * inner;
}

function polyline(
  svg: SVGSVGElement,
  series: string,
  color: string,
  vertices: Array<[number, number]>,
  dashed: boolean,
): void {
  const line = document.createElementNS(SVG_NS, "polyline");
  line.setAttribute("data-series", series);
  line.setAttribute("points", vertices.map(([x, y]) => `${x},${y}`).join(" "));
  line.setAttribute("fill", "none");
  line.setAttribute("stroke", color);
  line.setAttribute("stroke-width", dashed ? "1.5" : "2.5");
  if (dashed) {
    line.setAttribute("stroke-dasharray", "5,3");
  }
  svg.appendChild(line);
}

function endpointDot(
  svg: SVGSVGElement,
  series: string,
  color: string,
  [x, y]: [number, number],
): void {
  const dot = document.createElementNS(SVG_NS, "circle");
  dot.setAttribute("data-series", series);
  dot.setAttribute("cx", String(x));
  dot.setAttribute("cy", String(y));
  dot.setAttribute("r", "3.5");
  dot.setAttribute("fill", color);
  svg.appendChild(dot);
}

function axes(svg: SVGSVGElement, tMax: number, geom: ChartGeometry): void {
  for (const pct of [0, 0.25, 0.5, 0.75, 1]) {
    const y = yForPct(pct, geom);
    const grid = document.createElementNS(SVG_NS, "line");
    grid.setAttribute("x1", String(geom.left));
    grid.setAttribute("x2", String(geom.width - geom.right));
    grid.setAttribute("y1", String(y));
    grid.setAttribute("y2", String(y));
    grid.setAttribute("stroke", "#dddddd");
    svg.appendChild(grid);

    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(geom.left - 6));
    label.setAttribute("y", String(y + 4));
    label.setAttribute("text-anchor", "end");
    label.setAttribute("class", "axis-label");
    label.textContent = `${Math.round(pct * 100)}%`;
    svg.appendChild(label);
  }

  const xLabel = document.createElementNS(SVG_NS, "text");
  xLabel.setAttribute("x", String(geom.width - geom.right));
  xLabel.setAttribute("y", String(geom.height - 6));
  xLabel.setAttribute("text-anchor", "end");
  xLabel.setAttribute("class", "axis-label");
  xLabel.textContent = `iteration (0..${tMax})`;
  svg.appendChild(xLabel);
}

/** Redraw the dashboard chart from the full history.
 *
 * Gold is the unfiltered feed's liberal share, orange the balanced
 * feed's, black the constraint bounds. A constraint change appends a
 * second point at the same t, which draws as a vertical step in the
 * bound lines. The y axis always spans 0..100%.
 */
export function renderChart(
  svg: SVGSVGElement,
  history: HistoryPoint[],
  geom: ChartGeometry = DEFAULT_GEOMETRY,
): void {
  svg.replaceChildren();
  svg.setAttribute("viewBox", `0 0 ${geom.width} ${geom.height}`);
  svg.setAttribute("width", String(geom.width));
  svg.setAttribute("height", String(geom.height));
  if (history.length === 0) {
    return;
  }

  const tMax = Math.max(history[history.length - 1].t, 1);
  axes(svg, tMax, geom);

  const verts = (value: (p: HistoryPoint) => number): Array<[number, number]> =>
    history.map((p) => [xForT(p.t, tMax, geom), yForPct(value(p), geom)]);

  const lower = verts((p) => p.lower_liberal);
  const upper = verts((p) => p.upper_liberal);
  const unfiltered = verts((p) => p.pct_liberal_unfiltered);
  const balanced = verts((p) => p.pct_liberal_balanced);

  polyline(svg, "lower-bound", CURVE_BOUND, lower, true);
  polyline(svg, "upper-bound", CURVE_BOUND, upper, true);
  polyline(svg, "unfiltered", CURVE_UNFILTERED, unfiltered, false);
  polyline(svg, "balanced", CURVE_BALANCED, balanced, false);

  endpointDot(svg, "unfiltered", CURVE_UNFILTERED, unfiltered[unfiltered.length - 1]);
  endpointDot(svg, "balanced", CURVE_BALANCED, balanced[balanced.length - 1]);
}
