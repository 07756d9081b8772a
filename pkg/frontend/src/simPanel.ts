// Simulation steering: Reset / Start / Stop buttons bound to session
// commands, with the live frame stream drawn as a multi-series chart
// (x months, y population or amount). Re-subscribing replays the session's
// frame history, so a reloaded page reproduces the chart.

import type { ApiClient, FrameSubscription } from "./api.js";
import { ChartData, renderChart } from "./chart.js";
import type { Frame } from "./types.js";

export class SimPanel {
  chart = new ChartData();
  sessionId: string | null = null;
  status = "idle";
  private subscription: FrameSubscription | null = null;
  frames: Frame[] = [];

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private chartSvg: SVGSVGElement,
  ) {
    this.root.innerHTML = `
      <div class="sim-controls">
        <button class="sim-reset" disabled>Reset</button>
        <button class="sim-start" disabled>Start</button>
        <button class="sim-stop" disabled>Stop</button>
        <span class="sim-status">idle</span>
      </div>`;
    this.button("sim-reset").addEventListener("click", () => void this.reset());
    this.button("sim-start").addEventListener("click", () => void this.start());
    this.button("sim-stop").addEventListener("click", () => void this.stop());
  }

  private button(name: string): HTMLButtonElement {
    return this.root.querySelector(`.${name}`) as HTMLButtonElement;
  }

  private setStatus(status: string): void {
    this.status = status;
    (this.root.querySelector(".sim-status") as HTMLElement).textContent = status;
    this.button("sim-reset").disabled = this.sessionId === null;
    this.button("sim-start").disabled =
      this.sessionId === null || !(status === "ready" || status === "paused");
    this.button("sim-stop").disabled = this.sessionId === null || status !== "running";
  }

  async attach(modelId: string, seed: number, maxTicks: number): Promise<void> {
    const created = await this.api.createSimulation({
      model_id: modelId,
      seed,
      max_ticks: maxTicks,
    });
    this.sessionId = created.session_id;
    this.setStatus("ready");
    this.subscribe();
  }

  subscribe(): void {
    if (!this.sessionId) return;
    this.subscription?.close();
    this.chart.clear();
    this.frames = [];
    this.subscription = this.api.subscribeFrames(this.sessionId, (frame) => {
      this.frames.push(frame);
      this.chart.addFrame(frame);
      this.setStatus(frame.status);
      this.redraw();
    });
  }

  redraw(): void {
    renderChart(this.chartSvg, this.chart, 640, 260);
  }

  async start(): Promise<void> {
    if (!this.sessionId) return;
    const info = await this.api.command(this.sessionId, "start");
    this.setStatus(info.status);
  }

  async stop(): Promise<void> {
    if (!this.sessionId) return;
    const info = await this.api.command(this.sessionId, "stop");
    this.setStatus(info.status);
  }

  async reset(): Promise<void> {
    if (!this.sessionId) return;
    const info = await this.api.command(this.sessionId, "reset");
    this.chart.clear();
    this.frames = [];
    this.redraw();
    this.setStatus(info.status);
    this.subscribe();
  }

  detach(): void {
    this.subscription?.close();
    this.subscription = null;
    this.sessionId = null;
    this.setStatus("idle");
  }
}
