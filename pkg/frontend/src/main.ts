// Application wiring: canvas editing, parameter panel, species lookup, and
// the simulation panel, all against the service API. A single App instance
// owns the UI state; every mutation flows through App.update so the canvas
// and panel always reflect the latest validated document.

import { ApiClient } from "./api.js";
import { ModelCanvas } from "./canvas.js";
import { LookupDialog } from "./lookup.js";
import { ParamsPanel } from "./paramsPanel.js";
import { SimPanel } from "./simPanel.js";
import {
  addComponent,
  addRelationship,
  emptyModel,
  moveNode,
  applyDerivedProperties,
  setProperty,
} from "./state.js";
import type { ModelDoc, RelationshipKind, ValidationFinding } from "./types.js";

export class App {
  doc: ModelDoc = emptyModel();
  modelId: string | null = null;
  selected: string | null = null;
  findings: ValidationFinding[] = [];

  canvas: ModelCanvas;
  params: ParamsPanel;
  lookup: LookupDialog;
  sim: SimPanel;

  constructor(rootDoc: Document, public api: ApiClient) {
    const svg = rootDoc.querySelector("#model-canvas") as SVGSVGElement;
    this.canvas = new ModelCanvas(svg, {
      onSelect: (id) => this.select(id),
      onMove: (id, x, y) => this.update(moveNode(this.doc, id, { x, y }), false),
      onConnect: (source, target, kind) =>
        void this.update(addRelationship(this.doc, source, target, kind)),
    });
    this.params = new ParamsPanel(rootDoc.querySelector("#params-panel") as HTMLElement);
    this.params.onEdit = (id, field, value) =>
      void this.update(setProperty(this.doc, id, field, value));
    this.lookup = new LookupDialog(
      rootDoc.querySelector("#lookup-panel") as HTMLElement,
      api,
    );
    this.lookup.onApply = (result) => {
      if (!this.selected) return;
      void this.update(
        applyDerivedProperties(
          this.doc,
          this.selected,
          result.taxonId,
          result.response.properties,
        ),
      );
    };
    this.sim = new SimPanel(
      rootDoc.querySelector("#sim-panel") as HTMLElement,
      api,
      rootDoc.querySelector("#chart") as SVGSVGElement,
    );
    this.bindToolbar(rootDoc);
    this.render();
  }

  private bindToolbar(rootDoc: Document): void {
    const get = (id: string) => rootDoc.querySelector(id) as HTMLElement;
    get("#add-biotic").addEventListener("click", () => {
      const result = addComponent(this.doc, "biotic", "new species", { x: 150, y: 120 });
      void this.update(result.doc);
      this.select(result.id);
    });
    get("#add-abiotic").addEventListener("click", () => {
      const result = addComponent(this.doc, "abiotic", "new substance", { x: 320, y: 120 });
      void this.update(result.doc);
      this.select(result.id);
    });
    get("#connect").addEventListener("click", () => {
      const kindSelect = rootDoc.querySelector("#edge-kind") as HTMLSelectElement;
      this.canvas.startConnect(kindSelect.value as RelationshipKind);
    });
    get("#load-model").addEventListener("click", () => {
      const input = rootDoc.querySelector("#model-id") as HTMLInputElement;
      void this.loadModel(input.value.trim());
    });
    get("#new-session").addEventListener("click", () => {
      if (!this.modelId) return;
      const seed = Number((rootDoc.querySelector("#seed") as HTMLInputElement).value) || 0;
      const months =
        Number((rootDoc.querySelector("#months") as HTMLInputElement).value) || 120;
      void this.sim.attach(this.modelId, seed, months);
    });
  }

  async loadModel(modelId: string): Promise<void> {
    if (!modelId) return;
    this.doc = await this.api.getModel(modelId);
    this.modelId = modelId;
    this.selected = null;
    this.findings = [];
    this.render();
  }

  select(componentId: string | null): void {
    this.selected = componentId;
    this.render();
  }

  /** Apply a new document; optionally persist (PUT) and surface findings. */
  async update(doc: ModelDoc, persist = true): Promise<void> {
    this.doc = doc;
    if (persist && this.modelId) {
      try {
        await this.api.putModel(this.modelId, doc);
        this.findings = [];
      } catch (error: unknown) {
        const body = (error as { body?: { errors?: ValidationFinding[] } }).body;
        this.findings = body?.errors ?? [];
      }
    }
    this.render();
  }

  render(): void {
    this.canvas.render(this.doc, this.findings, this.selected);
    const component = this.doc.components.find((c) => c.id === this.selected);
    if (component) {
      this.params.show(component, this.findings);
    } else {
      this.params.clear();
    }
  }
}

export function boot(rootDoc: Document): App {
  return new App(rootDoc, new ApiClient(""));
}

declare global {
  interface Window {
    ecoforgeApp?: App;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined" && !("__vitest__" in globalThis)) {
  window.addEventListener("DOMContentLoaded", () => {
    window.ecoforgeApp = boot(document);
  });
}
