import { describe, expect, it } from "vitest";

import {
  addComponent,
  addRelationship,
  applyDerivedProperties,
  emptyModel,
  moveNode,
  nodePosition,
  removeComponent,
  setProperty,
} from "../src/state.js";
import { BIOTIC_FIELDS } from "../src/types.js";

describe("model editing", () => {
  it("adds biotic components with the full 13-field property set", () => {
    const { doc, id } = addComponent(emptyModel(), "biotic", "deer", { x: 10, y: 20 });
    expect(doc.components).toHaveLength(1);
    const component = doc.components[0];
    expect(component.id).toBe(id);
    expect(component.kind).toBe("biotic");
    expect(Object.keys(component.properties).sort()).toEqual([...BIOTIC_FIELDS].sort());
    expect(nodePosition(doc, id)).toEqual({ x: 10, y: 20 });
  });

  it("adds abiotic components with the 3-field property set", () => {
    const { doc } = addComponent(emptyModel(), "abiotic", "light", { x: 1, y: 2 });
    expect(Object.keys(doc.components[0].properties).sort()).toEqual([
      "amount",
      "growth_rate",
      "minimum_amount",
    ]);
  });

  it("assigns unique ids", () => {
    let doc = emptyModel();
    const first = addComponent(doc, "biotic", "a", { x: 0, y: 0 });
    const second = addComponent(first.doc, "biotic", "b", { x: 0, y: 0 });
    expect(first.id).not.toBe(second.id);
  });

  it("connects components with kind-specific default params", () => {
    let doc = emptyModel();
    doc = addComponent(doc, "biotic", "fox", { x: 0, y: 0 }).doc;
    doc = addComponent(doc, "biotic", "hare", { x: 0, y: 0 }).doc;
    const [fox, hare] = doc.components.map((c) => c.id);
    doc = addRelationship(doc, fox, hare, "consumes");
    expect(doc.relationships).toHaveLength(1);
    expect(doc.relationships[0].params).toEqual({
      consumption_rate: 1.0,
      interaction_probability: 0.5,
    });
    doc = addRelationship(doc, fox, hare, "becomes_on_death");
    expect(doc.relationships[1].params).toEqual({ percent_body_mass: 0.5 });
  });

  it("moves nodes by rewriting the layout metadata", () => {
    let { doc, id } = addComponent(emptyModel(), "biotic", "x", { x: 5, y: 5 });
    doc = moveNode(doc, id, { x: 99, y: 42 });
    expect(nodePosition(doc, id)).toEqual({ x: 99, y: 42 });
  });

  it("edits a single property immutably", () => {
    const { doc, id } = addComponent(emptyModel(), "biotic", "x", { x: 0, y: 0 });
    const edited = setProperty(doc, id, "lifespan", 36);
    expect(edited.components[0].properties.lifespan).toBe(36);
    expect(doc.components[0].properties.lifespan).toBe(24);
  });

  it("applies a derived parameter set and records the taxon", () => {
    const { doc, id } = addComponent(emptyModel(), "biotic", "kudzu", { x: 0, y: 0 });
    const derived = Object.fromEntries(BIOTIC_FIELDS.map((f, i) => [f, i + 1]));
    const updated = applyDerivedProperties(doc, id, "pueraria-montana", derived);
    expect(updated.components[0].taxon_ref).toBe("pueraria-montana");
    expect(updated.components[0].properties).toEqual(derived);
  });

  it("removing a component drops its relationships", () => {
    let doc = emptyModel();
    doc = addComponent(doc, "biotic", "fox", { x: 0, y: 0 }).doc;
    doc = addComponent(doc, "biotic", "hare", { x: 0, y: 0 }).doc;
    const [fox, hare] = doc.components.map((c) => c.id);
    doc = addRelationship(doc, fox, hare, "consumes");
    doc = removeComponent(doc, hare);
    expect(doc.components).toHaveLength(1);
    expect(doc.relationships).toHaveLength(0);
  });
});
