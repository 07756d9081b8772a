// Scripted UI loop (the acceptance flow): load the kudzu model (4 nodes,
// 4 edges rendered), the lookup dialog pre-fills 13 parameters from
// fixtures, Start produces a growing 4-series chart whose sampled points
// equal the streamed frame values, Stop freezes it, Reset clears it.
// The service is faked from fixtures recorded against the real backend's
// wire formats.

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/main.js";
import type { Frame, ModelDoc, ParametersResponse, TaxonMatch } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));

function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(here, "fixtures", name), "utf-8")) as T;
}

const kudzuDoc = fixture<ModelDoc>("kudzu.json");
const speciesSearch = fixture<TaxonMatch[]>("species_search.json");
const speciesParameters = fixture<ParametersResponse>("species_parameters.json");
const framesFixture = fixture<Frame[]>("frames.json");

class FakeEventSource {
  onmessage: ((event: { data: string }) => void) | null = null;
  onerror: ((event: unknown) => void) | null = null;
  closed = false;

  close(): void {
    this.closed = true;
  }

  deliver(frame: Frame): void {
    this.onmessage?.({ data: JSON.stringify(frame) });
  }
}

class FakeBackend {
  status = "ready";
  cursor = 0;
  source: FakeEventSource | null = null;
  putBodies: ModelDoc[] = [];

  fetch = (async (url: RequestInfo | URL, init?: RequestInit) => {
    const path = String(url);
    const method = init?.method ?? "GET";
    const respond = (status: number, body: unknown) =>
      new Response(JSON.stringify(body), { status });

    if (method === "GET" && path === `/api/v1/models/${kudzuDoc.id}`) {
      return respond(200, kudzuDoc);
    }
    if (method === "PUT" && path.startsWith("/api/v1/models/")) {
      this.putBodies.push(JSON.parse(String(init?.body)) as ModelDoc);
      return respond(200, { id: kudzuDoc.id });
    }
    if (method === "GET" && path.startsWith("/api/v1/species?q=")) {
      return respond(200, speciesSearch);
    }
    if (method === "GET" && path === "/api/v1/species/pueraria-montana/parameters") {
      return respond(200, speciesParameters);
    }
    if (method === "POST" && path === "/api/v1/simulations") {
      this.status = "ready";
      this.cursor = 0;
      return respond(201, { session_id: "sim-1", status: "ready", tick: 0 });
    }
    if (method === "POST" && path === "/api/v1/simulations/sim-1/command") {
      const command = (JSON.parse(String(init?.body)) as { command: string }).command;
      if (command === "start") this.status = "running";
      if (command === "stop") this.status = "paused";
      if (command === "reset") {
        this.status = "ready";
        this.cursor = 0;
      }
      return respond(200, {
        session_id: "sim-1",
        status: this.status,
        tick: command === "reset" ? 0 : this.cursor,
      });
    }
    return respond(404, { code: "UNKNOWN", message: path, subject: "" });
  }) as typeof fetch;

  eventSourceFactory = (_url: string) => {
    this.source = new FakeEventSource();
    return this.source;
  };

  /** Deliver up to `n` more frames; only flows while running. */
  pump(n: number): void {
    for (let i = 0; i < n && this.status === "running"; i++) {
      if (this.cursor >= framesFixture.length) return;
      this.source?.deliver(framesFixture[this.cursor]);
      this.cursor += 1;
    }
  }
}

const PAGE = `
  <header>
    <div class="toolbar">
      <input id="model-id" type="text" />
      <button id="load-model">Load</button>
      <button id="add-biotic">+ biotic</button>
      <button id="add-abiotic">+ abiotic</button>
      <select id="edge-kind"><option value="consumes">consumes</option></select>
      <button id="connect">Connect</button>
      <label>seed <input id="seed" type="number" value="7" /></label>
      <label>months <input id="months" type="number" value="12" /></label>
      <button id="new-session">New simulation</button>
    </div>
  </header>
  <main>
    <svg id="model-canvas"></svg>
    <div id="sim-panel"></div>
    <svg id="chart"></svg>
    <div id="params-panel"></div>
    <div id="lookup-panel"></div>
  </main>`;

describe("interactive model-simulate-refine loop", () => {
  let backend: FakeBackend;
  let app: App;

  beforeEach(() => {
    document.body.innerHTML = PAGE;
    backend = new FakeBackend();
    app = new App(
      document,
      new ApiClient("", backend.fetch, backend.eventSourceFactory),
    );
  });

  it("renders the kudzu model as 4 nodes and 4 edges", async () => {
    await app.loadModel(kudzuDoc.id);
    const rects = document.querySelectorAll("#model-canvas rect.shape");
    const ellipses = document.querySelectorAll("#model-canvas ellipse.shape");
    expect(rects).toHaveLength(3); // biotic components are rectangles
    expect(ellipses).toHaveLength(1); // the abiotic pool is an ellipse
    expect(document.querySelectorAll("#model-canvas line.edge")).toHaveLength(4);
  });

  it("lookup pre-fills all 13 parameters with method badges", async () => {
    await app.loadModel(kudzuDoc.id);
    app.select("kudzu");
    (document.querySelector(".lookup-query") as HTMLInputElement).value = "kudzu";
    await app.lookup.search();
    const items = document.querySelectorAll(".lookup-results li");
    expect(items.length).toBeGreaterThan(0);
    expect(items[0].getAttribute("data-taxon")).toBe("pueraria-montana");

    await app.lookup.select("pueraria-montana");
    const rows = document.querySelectorAll(".lookup-preview tbody tr");
    expect(rows).toHaveLength(13);
    expect(document.querySelectorAll(".lookup-preview .badge").length).toBe(13);

    (document.querySelector(".lookup-apply") as HTMLButtonElement).click();
    await Promise.resolve();
    const kudzu = app.doc.components.find((c) => c.id === "kudzu")!;
    expect(kudzu.taxon_ref).toBe("pueraria-montana");
    expect(kudzu.properties).toEqual(speciesParameters.properties);
    const inputs = document.querySelectorAll("#params-panel input");
    expect(inputs).toHaveLength(13);
  });

  it("start grows a 4-series chart equal to the streamed frames; stop freezes; reset clears", async () => {
    await app.loadModel(kudzuDoc.id);
    await app.sim.attach(kudzuDoc.id, 7, 12);
    await app.sim.start();
    backend.pump(6);

    expect(app.sim.chart.names().sort()).toEqual(
      ["american_hornbeam", "kudzu", "kudzu_bug", "light"].sort(),
    );
    expect(document.querySelectorAll("#chart polyline")).toHaveLength(4);
    const kudzuPoints = app.sim.chart.points("kudzu");
    expect(kudzuPoints).toHaveLength(6);
    kudzuPoints.forEach((point, i) => {
      expect(point.value).toBe(framesFixture[i].populations.kudzu.count);
      expect(point.tick).toBe(framesFixture[i].tick);
    });

    backend.pump(2); // chart keeps extending while running
    expect(app.sim.chart.points("kudzu")).toHaveLength(8);

    await app.sim.stop();
    backend.pump(5); // paused: the backend emits nothing
    expect(app.sim.chart.points("kudzu")).toHaveLength(8);
    expect(app.sim.status).toBe("paused");

    await app.sim.reset();
    expect(app.sim.chart.names()).toHaveLength(0);
    expect(document.querySelectorAll("#chart polyline")).toHaveLength(0);
    expect(app.sim.frames).toHaveLength(0);
  });

  it("editing through the canvas persists the relationship to the server", async () => {
    await app.loadModel(kudzuDoc.id);
    await app.update(
      (await import("../src/state.js")).addRelationship(
        app.doc,
        "kudzu-bug",
        "light",
        "affects",
      ),
    );
    const lastPut = backend.putBodies.at(-1)!;
    expect(lastPut.relationships).toHaveLength(5);
    expect(lastPut.relationships.at(-1)).toMatchObject({
      source: "kudzu-bug",
      target: "light",
      kind: "affects",
    });
  });
});
