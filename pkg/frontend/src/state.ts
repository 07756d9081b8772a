// Model-document editing. Every operation returns a new document in the
// canonical shape; node layout lives under metadata.layout so it round-trips
// through the service untouched.

import type {
  ComponentDoc,
  ComponentKind,
  ModelDoc,
  RelationshipKind,
} from "./types.js";
import { ABIOTIC_FIELDS, BIOTIC_FIELDS } from "./types.js";

export const DEFAULT_BIOTIC: Record<string, number> = {
  lifespan: 24.0,
  reproductive_maturity: 6.0,
  reproductive_interval: 6.0,
  offspring_count: 2.0,
  starting_population: 20.0,
  minimum_population: 0.0,
  body_mass: 1.0,
  carbon_biomass: 0.1,
  respiratory_rate: 0.005,
  photosynthesis_rate: 0.0,
  assimilation_efficiency: 0.1,
  move_direction: 0.0,
  move_velocity: 1.0,
};

export const DEFAULT_ABIOTIC: Record<string, number> = {
  amount: 100.0,
  minimum_amount: 0.0,
  growth_rate: 0.0,
};

export const DEFAULT_PARAMS: Record<RelationshipKind, Record<string, number>> = {
  consumes: { consumption_rate: 1.0, interaction_probability: 0.5 },
  destroys: { destruction_rate: 1.0, interaction_probability: 0.5 },
  produces: { production_rate: 1.0 },
  affects: { growth_rate_modifier: 0.0, interaction_probability: 1.0 },
  becomes_on_death: { percent_body_mass: 0.5 },
};

export interface Point {
  x: number;
  y: number;
}

export function emptyModel(name = "untitled model"): ModelDoc {
  return {
    version: 1,
    id: "",
    name,
    metadata: { layout: {} },
    components: [],
    relationships: [],
  };
}

function layoutOf(doc: ModelDoc): Record<string, Point> {
  const layout = doc.metadata["layout"];
  return (layout && typeof layout === "object" ? layout : {}) as Record<string, Point>;
}

export function nodePosition(doc: ModelDoc, componentId: string, index = 0): Point {
  const found = layoutOf(doc)[componentId];
  if (found) return found;
  // Deterministic fallback grid for documents without stored layout.
  return { x: 120 + (index % 4) * 170, y: 80 + Math.floor(index / 4) * 130 };
}

function freshId(prefix: string, taken: Set<string>): string {
  let n = 1;
  while (taken.has(`${prefix}-${n}`)) n += 1;
  return `${prefix}-${n}`;
}

export function addComponent(
  doc: ModelDoc,
  kind: ComponentKind,
  label: string,
  at: Point,
): { doc: ModelDoc; id: string } {
  const taken = new Set(doc.components.map((c) => c.id));
  const id = freshId(kind, taken);
  const component: ComponentDoc = {
    id,
    kind,
    label: label || id,
    taxon_ref: null,
    properties: { ...(kind === "biotic" ? DEFAULT_BIOTIC : DEFAULT_ABIOTIC) },
  };
  const layout = { ...layoutOf(doc), [id]: at };
  return {
    doc: {
      ...doc,
      components: [...doc.components, component],
      metadata: { ...doc.metadata, layout },
    },
    id,
  };
}

export function moveNode(doc: ModelDoc, componentId: string, to: Point): ModelDoc {
  const layout = { ...layoutOf(doc), [componentId]: to };
  return { ...doc, metadata: { ...doc.metadata, layout } };
}

export function removeComponent(doc: ModelDoc, componentId: string): ModelDoc {
  const layout = { ...layoutOf(doc) };
  delete layout[componentId];
  return {
    ...doc,
    components: doc.components.filter((c) => c.id !== componentId),
    relationships: doc.relationships.filter(
      (r) => r.source !== componentId && r.target !== componentId,
    ),
    metadata: { ...doc.metadata, layout },
  };
}

export function addRelationship(
  doc: ModelDoc,
  source: string,
  target: string,
  kind: RelationshipKind,
): ModelDoc {
  const taken = new Set(doc.relationships.map((r) => r.id));
  const id = freshId(`${source}-${kind}`, taken);
  return {
    ...doc,
    relationships: [
      ...doc.relationships,
      { id, source, target, kind, params: { ...DEFAULT_PARAMS[kind] } },
    ],
  };
}

export function setProperty(
  doc: ModelDoc,
  componentId: string,
  field: string,
  value: number,
): ModelDoc {
  return {
    ...doc,
    components: doc.components.map((c) =>
      c.id === componentId
        ? { ...c, properties: { ...c.properties, [field]: value } }
        : c,
    ),
  };
}

export function applyDerivedProperties(
  doc: ModelDoc,
  componentId: string,
  taxonId: string,
  properties: Record<string, number>,
): ModelDoc {
  return {
    ...doc,
    components: doc.components.map((c) =>
      c.id === componentId
        ? { ...c, taxon_ref: taxonId, properties: { ...properties } }
        : c,
    ),
  };
}

export function propertyFields(kind: ComponentKind): string[] {
  return kind === "biotic" ? [...BIOTIC_FIELDS] : [...ABIOTIC_FIELDS];
}
