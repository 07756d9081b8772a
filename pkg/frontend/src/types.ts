// Wire formats of the ecoforge service (/api/v1) and the version-1 model
// document. These mirror the canonical JSON schemas exactly.

export type ComponentKind = "biotic" | "abiotic";

export type RelationshipKind =
  | "consumes"
  | "destroys"
  | "produces"
  | "affects"
  | "becomes_on_death";

export interface BioticProperties {
  lifespan: number;
  reproductive_maturity: number;
  reproductive_interval: number;
  offspring_count: number;
  starting_population: number;
  minimum_population: number;
  body_mass: number;
  carbon_biomass: number;
  respiratory_rate: number;
  photosynthesis_rate: number;
  assimilation_efficiency: number;
  move_direction: number;
  move_velocity: number;
}

export interface AbioticProperties {
  amount: number;
  minimum_amount: number;
  growth_rate: number;
}

export interface ComponentDoc {
  id: string;
  kind: ComponentKind;
  label: string;
  taxon_ref: string | null;
  properties: Record<string, number>;
}

export interface RelationshipDoc {
  id: string;
  source: string;
  target: string;
  kind: RelationshipKind;
  params: Record<string, number>;
}

export interface ModelDoc {
  version: 1;
  id: string;
  name: string;
  metadata: Record<string, unknown>;
  components: ComponentDoc[];
  relationships: RelationshipDoc[];
}

export interface ValidationFinding {
  code: string;
  message: string;
  subject: string;
}

export interface ValidationReport {
  errors: ValidationFinding[];
  warnings: ValidationFinding[];
}

export interface TaxonMatch {
  taxon_id: string;
  canonical_name: string;
  common_names: string[];
  ancestry: string[];
}

export interface DerivationEntry {
  parameter: string;
  method: "Direct" | "AncestryEstimate" | "Default";
  formula: string;
  value: number;
}

export interface ParametersResponse {
  properties: Record<string, number>;
  report: { taxon_id: string; entries: DerivationEntry[] };
}

export interface Frame {
  tick: number;
  populations: Record<string, { count: number; carbon: number }>;
  pools: Record<string, number>;
  status: string;
}

export interface SessionInfo {
  session_id: string;
  status: string;
  tick: number;
}

export const BIOTIC_FIELDS: (keyof BioticProperties)[] = [
  "lifespan",
  "reproductive_maturity",
  "reproductive_interval",
  "offspring_count",
  "starting_population",
  "minimum_population",
  "body_mass",
  "carbon_biomass",
  "respiratory_rate",
  "photosynthesis_rate",
  "assimilation_efficiency",
  "move_direction",
  "move_velocity",
];

export const ABIOTIC_FIELDS: (keyof AbioticProperties)[] = [
  "amount",
  "minimum_amount",
  "growth_rate",
];
