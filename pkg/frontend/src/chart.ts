// Time-series chart data and SVG polyline rendering. Chart points are the
// streamed frame values verbatim; colors are a stable hash of the series
// name so a component keeps its color for the whole session.

import type { Frame } from "./types.js";

const PALETTE = [
  "#2b6cb0",
  "#2f855a",
  "#b7791f",
  "#9f7aea",
  "#c53030",
  "#319795",
  "#b83280",
  "#718096",
];

export function seriesColor(name: string): string {
  let hash = 2166136261;
  for (let i = 0; i < name.length; i++) {
    hash ^= name.charCodeAt(i);
    hash = Math.imul(hash, 16777619) >>> 0;
  }
  return PALETTE[hash % PALETTE.length];
}

export interface SeriesPoint {
  tick: number;
  value: number;
}

export class ChartData {
  private series = new Map<string, SeriesPoint[]>();
  maxTick = 0;
  maxValue = 1;

  addFrame(frame: Frame): void {
    for (const [name, stats] of Object.entries(frame.populations)) {
      this.push(name, frame.tick, stats.count);
    }
    for (const [name, amount] of Object.entries(frame.pools)) {
      this.push(name, frame.tick, amount);
    }
  }

  private push(name: string, tick: number, value: number): void {
    let points = this.series.get(name);
    if (!points) {
      points = [];
      this.series.set(name, points);
    }
    points.push({ tick, value });
    if (tick > this.maxTick) this.maxTick = tick;
    if (value > this.maxValue) this.maxValue = value;
  }

  names(): string[] {
    return [...this.series.keys()];
  }

  points(name: string): SeriesPoint[] {
    return this.series.get(name) ?? [];
  }

  clear(): void {
    this.series.clear();
    this.maxTick = 0;
    this.maxValue = 1;
  }

  polyline(name: string, width: number, height: number): string {
    const points = this.points(name);
    const spanX = Math.max(this.maxTick, 1);
    const spanY = Math.max(this.maxValue, 1);
    return points
      .map((p) => {
        const x = (p.tick / spanX) * (width - 10) + 5;
        const y = height - 5 - (p.value / spanY) * (height - 10);
        return `${x.toFixed(1)},${y.toFixed(1)}`;
      })
      .join(" ");
  }
}

export function renderChart(
  svg: SVGSVGElement,
  chart: ChartData,
  width: number,
  height: number,
): void {
  const doc = svg.ownerDocument;
  svg.innerHTML = "";
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  for (const name of chart.names()) {
    const line = doc.createElementNS("http://www.w3.org/2000/svg", "polyline");
    line.setAttribute("points", chart.polyline(name, width, height));
    line.setAttribute("fill", "none");
    line.setAttribute("stroke", seriesColor(name));
    line.setAttribute("stroke-width", "1.6");
    line.setAttribute("data-series", name);
    svg.appendChild(line);
  }
}
