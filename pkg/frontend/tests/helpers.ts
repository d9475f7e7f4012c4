/**
 * Test utilities: fixture loading and state builders.
 *
 * Fixtures under tests/fixtures/ are raw gateway response bodies captured
 * by scripts/generate_fixtures.py; tests treat them as the ground truth
 * the panels must echo.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/client.js";
import {
  applyClassifications,
  applyControlRanking,
  applyDetail,
  applyGraph,
  applyRanking,
  initialState,
  setAssessor,
  type WorkbenchState,
} from "../src/state.js";
import type {
  AssessmentDetail,
  ClassificationsPayload,
  ControlRankingPayload,
  GraphPayload,
  RankingPayload,
  WhatIfPayload,
} from "../src/types.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function loadFixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf-8")) as T;
}

export const detailFixture = (): AssessmentDetail => loadFixture("assessment.json");
export const classificationsFixture = (): ClassificationsPayload =>
  loadFixture("classifications.json");
export const rankingFixture = (): RankingPayload => loadFixture("ranking.json");
export const controlsFixture = (): ControlRankingPayload =>
  loadFixture("controls_ranking.json");
export const graphFixture = (): GraphPayload => loadFixture("graph.json");
export const whatifEmptyFixture = (): WhatIfPayload => loadFixture("whatif_empty.json");
export const whatifUpgradeFixture = (): WhatIfPayload => loadFixture("whatif_upgrade.json");
export const whatifParadoxFixture = (): WhatIfPayload => loadFixture("whatif_paradox.json");

/** A fully loaded workbench: detail, lanes, rankings, and graph applied. */
export function loadedState(): WorkbenchState {
  let state = applyDetail(initialState(), detailFixture());
  state = applyClassifications(state, classificationsFixture());
  state = applyRanking(state, rankingFixture());
  state = applyControlRanking(state, controlsFixture());
  state = applyGraph(state, graphFixture());
  return setAssessor(state, "alice");
}

export interface RecordedCall {
  url: string;
  method: string;
  headers: Record<string, string>;
  body: unknown;
}

export interface FakeRoute {
  status: number;
  body: unknown;
}

/** Fake fetch keyed by "METHOD path"; unknown routes reject the promise. */
export function fakeFetch(routes: Record<string, FakeRoute>): {
  impl: FetchLike;
  calls: RecordedCall[];
} {
  const calls: RecordedCall[] = [];
  const impl: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    calls.push({
      url,
      method,
      headers: { ...((init?.headers ?? {}) as Record<string, string>) },
      body: typeof init?.body === "string" ? JSON.parse(init.body) : undefined,
    });
    const route = routes[`${method} ${url}`];
    if (!route) {
      throw new TypeError(`fetch failed: no route for ${method} ${url}`);
    }
    return new Response(JSON.stringify(route.body), {
      status: route.status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { impl, calls };
}

/** A fetch stand-in for a gateway that is down: every call rejects. */
export const offlineFetch: FetchLike = async () => {
  throw new TypeError("fetch failed: connection refused");
};
