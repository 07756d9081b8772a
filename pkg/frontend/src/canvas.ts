// SVG model canvas: biotic components draw as rectangles, abiotic as
// ellipses; relationships as labeled arrows. Dragging updates the layout;
// connect mode links two clicked nodes with the chosen relationship kind.

import type { ModelDoc, RelationshipKind, ValidationFinding } from "./types.js";
import { nodePosition } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface CanvasCallbacks {
  onSelect(componentId: string | null): void;
  onMove(componentId: string, x: number, y: number): void;
  onConnect(source: string, target: string, kind: RelationshipKind): void;
}

export class ModelCanvas {
  private connectSource: string | null = null;
  connectKind: RelationshipKind | null = null;

  constructor(
    private svg: SVGSVGElement,
    private callbacks: CanvasCallbacks,
  ) {}

  render(doc: ModelDoc, findings: ValidationFinding[] = [], selected: string | null = null): void {
    const owner = this.svg.ownerDocument;
    this.svg.innerHTML = "";
    const defs = owner.createElementNS(SVG_NS, "defs");
    defs.innerHTML =
      '<marker id="arrow" markerWidth="8" markerHeight="8" refX="7" refY="3" orient="auto">' +
      '<path d="M0,0 L7,3 L0,6 z" fill="#555"></path></marker>';
    this.svg.appendChild(defs);

    const positions = new Map(
      doc.components.map((c, i) => [c.id, nodePosition(doc, c.id, i)]),
    );
    const bad = new Set(findings.map((f) => f.subject));

    for (const rel of doc.relationships) {
      const from = positions.get(rel.source);
      const to = positions.get(rel.target);
      if (!from || !to) continue;
      const line = owner.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(from.x));
      line.setAttribute("y1", String(from.y));
      line.setAttribute("x2", String(to.x));
      line.setAttribute("y2", String(to.y));
      line.setAttribute("stroke", bad.has(rel.id) ? "#c53030" : "#555");
      line.setAttribute("marker-end", "url(#arrow)");
      line.setAttribute("data-edge", rel.id);
      line.setAttribute("class", "edge");
      this.svg.appendChild(line);
      const label = owner.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String((from.x + to.x) / 2));
      label.setAttribute("y", String((from.y + to.y) / 2 - 4));
      label.setAttribute("class", "edge-label");
      label.textContent = rel.kind.replace(/_/g, " ");
      this.svg.appendChild(label);
    }

    doc.components.forEach((component, index) => {
      const at = positions.get(component.id)!;
      const group = owner.createElementNS(SVG_NS, "g");
      group.setAttribute("data-node", component.id);
      group.setAttribute("class", "node");
      let shape: SVGElement;
      if (component.kind === "biotic") {
        shape = owner.createElementNS(SVG_NS, "rect");
        shape.setAttribute("x", String(at.x - 55));
        shape.setAttribute("y", String(at.y - 24));
        shape.setAttribute("width", "110");
        shape.setAttribute("height", "48");
        shape.setAttribute("rx", "6");
      } else {
        shape = owner.createElementNS(SVG_NS, "ellipse");
        shape.setAttribute("cx", String(at.x));
        shape.setAttribute("cy", String(at.y));
        shape.setAttribute("rx", "58");
        shape.setAttribute("ry", "26");
      }
      shape.setAttribute("class", `shape ${component.kind}`);
      if (bad.has(component.id)) shape.setAttribute("stroke", "#c53030");
      if (component.id === selected) shape.classList.add("selected");
      group.appendChild(shape);
      const text = owner.createElementNS(SVG_NS, "text");
      text.setAttribute("x", String(at.x));
      text.setAttribute("y", String(at.y + 4));
      text.setAttribute("class", "node-label");
      text.textContent = component.label;
      group.appendChild(text);
      this.attachNodeHandlers(group, component.id, index);
      this.svg.appendChild(group);
    });
  }

  startConnect(kind: RelationshipKind): void {
    this.connectKind = kind;
    this.connectSource = null;
  }

  private attachNodeHandlers(group: SVGGElement, componentId: string, _index: number): void {
    let dragging = false;
    let moved = false;
    group.addEventListener("mousedown", () => {
      dragging = true;
      moved = false;
    });
    group.addEventListener("mousemove", (event: MouseEvent) => {
      if (!dragging || event.buttons === 0) return;
      moved = true;
      this.callbacks.onMove(componentId, event.offsetX, event.offsetY);
    });
    group.addEventListener("mouseup", () => {
      dragging = false;
    });
    group.addEventListener("click", () => {
      if (moved) return;
      if (this.connectKind) {
        if (this.connectSource === null) {
          this.connectSource = componentId;
        } else if (this.connectSource !== componentId) {
          const kind = this.connectKind;
          const source = this.connectSource;
          this.connectKind = null;
          this.connectSource = null;
          this.callbacks.onConnect(source, componentId, kind);
        }
        return;
      }
      this.callbacks.onSelect(componentId);
    });
  }
}
