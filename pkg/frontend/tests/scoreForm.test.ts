import { describe, expect, it } from "vitest";

import { renderScoreForm } from "../src/panels/scoreForm.js";
import {
  applyScoreFindings,
  initialState,
  markProblems,
  openScoreForm,
  setScoreValue,
  validateScoreForm,
} from "../src/state.js";
import type { ErrorBody } from "../src/types.js";
import { detailFixture, loadFixture, loadedState } from "./helpers.js";

const CRITERIA = [
  "evidence",
  "skill-required",
  "applicability",
  "positioning-effect",
  "recovery-time",
  "restore-cost",
  "detectability",
  "graph-confidence",
];

function formFor(ttpId: string) {
  return openScoreForm(loadedState(), ttpId);
}

describe("score form validation", () => {
  const rubric = detailFixture().rubric;

  it("requires a value for every rubric criterion", () => {
    const result = validateScoreForm(rubric, {});
    expect(result.ok).toBe(false);
    expect(Object.keys(result.problems).sort()).toEqual([...CRITERIA].sort());
  });

  it("rejects values outside 1..5 and non-integers", () => {
    for (const bad of ["0", "6", "2.5", "-1", "abc", ""]) {
      const raw = Object.fromEntries(CRITERIA.map((id) => [id, "3"]));
      raw["evidence"] = bad;
      const result = validateScoreForm(rubric, raw);
      expect(result.ok, `input ${JSON.stringify(bad)} should fail`).toBe(false);
      expect(Object.keys(result.problems)).toEqual(["evidence"]);
    }
  });

  it("accepts a complete form of whole values in 1..5", () => {
    const raw = Object.fromEntries(CRITERIA.map((id) => [id, "4"]));
    const result = validateScoreForm(rubric, raw);
    expect(result.ok).toBe(true);
    expect(result.values).toEqual(Object.fromEntries(CRITERIA.map((id) => [id, 4])));
  });

  it("covers exactly the eight shipped criteria", () => {
    expect(rubric.criteria.map((c) => c.id)).toEqual(CRITERIA);
  });
});

describe("score form rendering", () => {
  it("renders one fieldset per criterion with anchor tooltips", () => {
    const html = renderScoreForm(formFor("LN-A"));
    for (const id of CRITERIA) {
      expect(html).toContain(`data-criterion="${id}"`);
    }
    expect(html).toContain(`title="No evidence of TTP"`);
    expect(html).toContain(`title="Confirmed evidence of TTP in at least one knowledge base"`);
    expect(html).toContain(`title="No specific skills required"`);
  });

  it("marks the chosen value as checked", () => {
    const state = setScoreValue(formFor("LN-A"), "evidence", "4");
    const html = renderScoreForm(state);
    const evidenceRow = html.split(`data-criterion="evidence"`)[1]?.split("</fieldset>")[0] ?? "";
    expect(evidenceRow).toContain(`value="4" checked`);
  });

  it("highlights criteria with client-side problems", () => {
    const state = markProblems(formFor("LN-A"), {
      evidence: "required: pick a value from 1 to 5",
    });
    const html = renderScoreForm(state);
    const evidenceRow = html.split(`data-criterion="evidence"`)[1]?.split("</fieldset>")[0] ?? "";
    expect(html).toContain(`class="criterion has-problem" data-criterion="evidence"`);
    expect(evidenceRow).toContain("required: pick a value from 1 to 5");
  });

  it("renders gateway findings inline under the named criterion", () => {
    const errorBody = loadFixture<ErrorBody>("scores_error.json");
    const state = applyScoreFindings(formFor("LN-A"), errorBody.findings ?? []);
    const html = renderScoreForm(state);
    const evidenceRow = html.split(`data-criterion="evidence"`)[1]?.split("</fieldset>")[0] ?? "";
    expect(evidenceRow).toContain("criterion-findings");
    expect(evidenceRow).toContain("outside 1..5");
    const skillRow = html.split(`data-criterion="skill-required"`)[1]?.split("</fieldset>")[0] ?? "";
    expect(skillRow).not.toContain("criterion-findings");
  });

  it("shows mean, range, and the divergence badge from the ranking payload", () => {
    const html = renderScoreForm(formFor("LN-A"));
    const detectRow = html.split(`data-criterion="detectability"`)[1]?.split("</fieldset>")[0] ?? "";
    expect(detectRow).toContain("mean 2.5, range 3");
    expect(detectRow).toContain("badge-divergence");
    const evidenceRow = html.split(`data-criterion="evidence"`)[1]?.split("</fieldset>")[0] ?? "";
    expect(evidenceRow).toContain("mean 4, range 0");
    expect(evidenceRow).not.toContain("badge-divergence");
  });

  it("omits divergence badges for TTPs whose assessors agree", () => {
    const html = renderScoreForm(formFor("LN-B"));
    expect(html).not.toContain("badge-divergence");
  });

  it("renders a placeholder until a TTP is selected", () => {
    expect(renderScoreForm(initialState())).toContain("Select a TTP to score.");
  });

  it("matches the snapshot", () => {
    expect(renderScoreForm(formFor("LN-A"))).toMatchSnapshot();
  });
});
