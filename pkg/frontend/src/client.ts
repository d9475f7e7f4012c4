/**
 * Typed fetch client for the assessment gateway.
 *
 * Every workbench request goes through this module; no other code talks
 * to the network. Errors surface as GatewayError with the gateway's own
 * detail text, and network failures carry status 0 so callers can offer
 * a retry instead of showing stale data.
 */

import type {
  AssessmentDetail,
  AssessmentSummary,
  ClassificationsPayload,
  ControlRankingPayload,
  ErrorBody,
  GraphPayload,
  RankingPayload,
  ReportResponse,
  ScoreSubmission,
  ScoresResponse,
  StagedChange,
  WhatIfPayload,
} from "./types.js";

export class GatewayError extends Error {
  readonly status: number;
  readonly findings: string[];

  constructor(status: number, detail: string, findings: string[] = []) {
    super(detail);
    this.name = "GatewayError";
    this.status = status;
    this.findings = findings;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface ClientOptions {
  baseUrl?: string;
  actor?: string;
  fetchImpl?: FetchLike;
}

interface RequestOptions {
  idempotencyKey?: string;
}

export class GatewayClient {
  private readonly baseUrl: string;
  private readonly actor: string | null;
  private readonly fetchImpl: FetchLike;

  constructor(options: ClientOptions = {}) {
    const base = options.baseUrl ?? "";
    this.baseUrl = base.endsWith("/") ? base.substring(0, base.lastIndexOf("/")) : base;
    this.actor = options.actor ?? null;
    this.fetchImpl = options.fetchImpl ?? ((url, init) => fetch(url, init));
  }

  listAssessments(): Promise<{ assessments: AssessmentSummary[] }> {
    return this.request("GET", "/assessments");
  }

  getAssessment(id: string): Promise<AssessmentDetail> {
    return this.request("GET", `/assessments/${encodeURIComponent(id)}`);
  }

  createAssessment(
    payload: Record<string, unknown>,
    options: RequestOptions = {},
  ): Promise<AssessmentSummary> {
    return this.request("POST", "/assessments", payload, options);
  }

  submitScores(
    id: string,
    scores: ScoreSubmission[],
    options: RequestOptions = {},
  ): Promise<ScoresResponse> {
    return this.request(
      "POST",
      `/assessments/${encodeURIComponent(id)}/scores`,
      { scores },
      options,
    );
  }

  getClassifications(id: string): Promise<ClassificationsPayload> {
    return this.request("GET", `/assessments/${encodeURIComponent(id)}/classifications`);
  }

  getRanking(id: string): Promise<RankingPayload> {
    return this.request("GET", `/assessments/${encodeURIComponent(id)}/ranking`);
  }

  getControlRanking(id: string): Promise<ControlRankingPayload> {
    return this.request("GET", `/assessments/${encodeURIComponent(id)}/controls/ranking`);
  }

  runWhatIf(id: string, changes: StagedChange[]): Promise<WhatIfPayload> {
    return this.request("POST", `/assessments/${encodeURIComponent(id)}/whatif`, { changes });
  }

  generateReport(id: string, options: RequestOptions = {}): Promise<ReportResponse> {
    return this.request("POST", `/assessments/${encodeURIComponent(id)}/report`, {}, options);
  }

  getGraph(id: string): Promise<GraphPayload> {
    return this.request("GET", `/graph/${encodeURIComponent(id)}`);
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    options: RequestOptions = {},
  ): Promise<T> {
    const headers: Record<string, string> = { Accept: "application/json" };
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.actor) headers["X-Actor"] = this.actor;
    if (options.idempotencyKey) headers["Idempotency-Key"] = options.idempotencyKey;

    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, {
        method,
        headers,
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new GatewayError(0, `gateway unreachable: ${String(err)}`);
    }

    if (!response.ok) {
      let detail = `${method} ${path} failed with ${response.status}`;
      let findings: string[] = [];
      try {
        const parsed = (await response.json()) as ErrorBody;
        if (typeof parsed.detail === "string") detail = parsed.detail;
        if (Array.isArray(parsed.findings)) findings = parsed.findings;
      } catch {
        // non-JSON error body; keep the generic detail
      }
      throw new GatewayError(response.status, detail, findings);
    }
    return (await response.json()) as T;
  }
}
