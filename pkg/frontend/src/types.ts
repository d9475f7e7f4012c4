/**
 * Wire types for the assessment gateway JSON API.
 *
 * These mirror the response bodies field for field. The workbench never
 * derives numbers of its own; everything rendered is read from one of
 * these payloads.
 */

export type TtpClass = "probable" | "plausible" | "possible_only" | "excluded";

export interface ClassificationRow {
  ttp_id: string;
  class: TtpClass;
  sphere: "risk" | "uncertainty";
  rationale: string[];
}

export interface ClassificationsPayload {
  classifications: ClassificationRow[];
  scoped_ttps: string[];
  mode: string;
}

export interface CriterionDef {
  id: string;
  question: string;
  anchors: string[];
  weight: number;
}

export interface Rubric {
  schema_version: string;
  version: string;
  criteria: CriterionDef[];
}

export interface AggregateRow {
  ttp_id: string;
  assessor_count: number;
  means: Record<string, number>;
  ranges: Record<string, number>;
  divergence: string[];
  weighted_total: number;
}

export interface RankingPayload {
  ttp_ranking: string[];
  aggregates: AggregateRow[];
}

export interface EvaluationRow {
  control_id: string;
  benefit: number;
  cost: number;
  ratio: number;
  ratio_display: string;
}

export interface ControlRankingPayload {
  control_ranking: string[];
  evaluations: EvaluationRow[];
  coverage_csv: string | null;
}

export interface AttackPathWire {
  nodes: string[];
  propensity: number;
  detect_coverage: number;
  viability: boolean;
}

export interface ReplanWire {
  old_path: AttackPathWire | null;
  new_path: AttackPathWire | null;
  paradox: boolean;
  deltas: Record<string, number | null>;
}

export interface ControlCost {
  develop?: number;
  implement?: number;
  maintain?: number;
}

export interface MitigationCell {
  ttp_id: string;
  criterion: string;
  level: string;
}

export interface ControlDraft {
  id: string;
  name?: string;
  cost?: ControlCost;
  mitigations?: MitigationCell[];
}

export type StagedChange =
  | { op: "add_control"; control: ControlDraft }
  | { op: "remove_control"; control_id: string }
  | {
      op: "change_level";
      control_id: string;
      ttp_id: string;
      criterion: string;
      new_level: string;
    };

/** A staged change echoed back with the benefit movement it caused. */
export type AppliedChange = StagedChange & { benefit_delta: number };

export interface WhatIfPayload {
  assessment_id: string;
  changes: AppliedChange[];
  evaluations: EvaluationRow[];
  control_ranking: string[];
  ratio_deltas: Record<string, number | null>;
  replan: ReplanWire;
  paradox: boolean;
  content_hash: string;
}

export interface GraphNode {
  id: string;
  kind: string;
  label: string;
}

export interface GraphEdge {
  from: string;
  to: string;
  relation: string;
  confidence: number;
}

export interface GraphPayload {
  schema_version: string;
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface AssessmentSummary {
  id: string;
  mode: string;
  status: string;
  created_at: string;
  scoped_ttps: string[];
  content_hash: string;
}

/** GET /assessments/{id}; only the fields the workbench reads are typed. */
export interface AssessmentDetail {
  id: string;
  mode: string;
  status: string;
  scoped_ttps: string[];
  rubric: Rubric;
  content_hash: string;
  [extra: string]: unknown;
}

export interface ScoreSubmission {
  assessor_id: string;
  ttp_id: string;
  values: Record<string, number>;
}

export interface ScoresResponse {
  accepted: number;
  missing_scoped_ttps: string[];
  pipeline_ran: boolean;
  status: string;
  content_hash: string;
}

export interface ReportResponse {
  report: Record<string, unknown>;
  markdown: string;
  status: string;
  content_hash: string;
}

export interface ErrorBody {
  detail: string;
  findings?: string[];
}
