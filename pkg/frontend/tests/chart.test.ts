import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import { describe, expect, it } from "vitest";

import { ChartData, seriesColor } from "../src/chart.js";
import type { Frame } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));
const frames: Frame[] = JSON.parse(
  readFileSync(join(here, "fixtures", "frames.json"), "utf-8"),
);

describe("chart data", () => {
  it("stores every streamed value verbatim, one series per component", () => {
    const chart = new ChartData();
    for (const frame of frames) chart.addFrame(frame);
    const names = chart.names();
    expect(names).toContain("kudzu");
    expect(names).toContain("american_hornbeam");
    expect(names).toContain("kudzu_bug");
    expect(names).toContain("light");
    expect(names).toHaveLength(4);
    const kudzu = chart.points("kudzu");
    expect(kudzu).toHaveLength(frames.length);
    frames.forEach((frame, i) => {
      expect(kudzu[i]).toEqual({ tick: frame.tick, value: frame.populations.kudzu.count });
    });
    const light = chart.points("light");
    frames.forEach((frame, i) => {
      expect(light[i].value).toBe(frame.pools.light);
    });
  });

  it("colors are stable per series name", () => {
    expect(seriesColor("kudzu")).toBe(seriesColor("kudzu"));
    const colors = new Set(["kudzu", "american_hornbeam", "kudzu_bug"].map(seriesColor));
    expect(colors.size).toBeGreaterThan(1);
  });

  it("clear resets everything", () => {
    const chart = new ChartData();
    for (const frame of frames) chart.addFrame(frame);
    chart.clear();
    expect(chart.names()).toHaveLength(0);
    expect(chart.maxTick).toBe(0);
  });

  it("polyline x positions increase with tick", () => {
    const chart = new ChartData();
    for (const frame of frames) chart.addFrame(frame);
    const points = chart
      .polyline("kudzu", 640, 260)
      .split(" ")
      .map((pair) => Number(pair.split(",")[0]));
    for (let i = 1; i < points.length; i++) {
      expect(points[i]).toBeGreaterThan(points[i - 1]);
    }
  });
});
