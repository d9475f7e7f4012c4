/**
 * Payload traceability: every figure the data panels display must exist
 * verbatim in a gateway response. Rendered numeric tokens are collected
 * from the value-bearing elements and checked against the set of numbers
 * (and numeric strings such as ratio_display) in the fixtures.
 */

import { describe, expect, it } from "vitest";

import { renderRanking } from "../src/panels/ranking.js";
import { renderScoreForm } from "../src/panels/scoreForm.js";
import { renderWhatIf } from "../src/panels/whatif.js";
import { applyWhatIf, openScoreForm, stageChange } from "../src/state.js";
import {
  controlsFixture,
  loadedState,
  rankingFixture,
  whatifUpgradeFixture,
} from "./helpers.js";

const NUMERIC = /-?\d+(?:\.\d+)?/g;
const NUMERIC_ONLY = /^-?\d+(?:\.\d+)?$/;

function payloadNumbers(value: unknown, into = new Set<string>()): Set<string> {
  if (typeof value === "number") {
    into.add(String(value));
  } else if (typeof value === "string" && NUMERIC_ONLY.test(value)) {
    into.add(value);
  } else if (Array.isArray(value)) {
    for (const item of value) payloadNumbers(item, into);
  } else if (value && typeof value === "object") {
    for (const item of Object.values(value)) payloadNumbers(item, into);
  }
  return into;
}

function displayedTokens(html: string, classes: string[]): string[] {
  const tokens: string[] = [];
  for (const cls of classes) {
    for (const chunk of html.split(`class="${cls}"`).slice(1)) {
      const text = chunk.split(">").slice(1).join(">").split("<")[0] ?? "";
      tokens.push(...(text.match(NUMERIC) ?? []));
    }
  }
  return tokens;
}

describe("payload traceability", () => {
  it("ranking panel figures all come from the ranking payloads", () => {
    const allowed = payloadNumbers(rankingFixture());
    payloadNumbers(controlsFixture(), allowed);
    const html = renderRanking(loadedState());
    const tokens = displayedTokens(html, ["weighted-total", "benefit", "cost", "ratio"]);
    expect(tokens.length).toBeGreaterThan(6);
    for (const token of tokens) {
      expect(allowed.has(token), `rendered ${token} is not a payload value`).toBe(true);
    }
  });

  it("what-if figures all come from the what-if and committed payloads", () => {
    const allowed = payloadNumbers(whatifUpgradeFixture());
    payloadNumbers(controlsFixture(), allowed);
    const state = applyWhatIf(
      stageChange(loadedState(), {
        op: "change_level",
        control_id: "CN-2",
        ttp_id: "LN-B",
        criterion: "DETECT",
        new_level: "high",
      }),
      whatifUpgradeFixture(),
    );
    const html = renderWhatIf(state);
    const tokens = displayedTokens(html, ["chip chip-benefit", "ratio", "ratio-delta"]);
    expect(tokens.length).toBeGreaterThan(5);
    for (const token of tokens) {
      expect(allowed.has(token), `rendered ${token} is not a payload value`).toBe(true);
    }
  });

  it("score form aggregates come from the ranking payload", () => {
    const allowed = payloadNumbers(rankingFixture());
    const html = renderScoreForm(openScoreForm(loadedState(), "LN-A"));
    const tokens = displayedTokens(html, ["criterion-aggregate"]);
    expect(tokens.length).toBeGreaterThan(8);
    for (const token of tokens) {
      expect(allowed.has(token), `rendered ${token} is not a payload value`).toBe(true);
    }
  });
});
