import { describe, expect, it } from "vitest";

import { renderWhatIf } from "../src/panels/whatif.js";
import {
  applyDetail,
  applyWhatIf,
  initialState,
  sandboxError,
  sandboxHashMatches,
  stageChange,
} from "../src/state.js";
import type { AssessmentDetail } from "../src/types.js";
import {
  detailFixture,
  loadFixture,
  loadedState,
  whatifEmptyFixture,
  whatifParadoxFixture,
  whatifUpgradeFixture,
} from "./helpers.js";

const STAGED_UPGRADE = {
  op: "change_level" as const,
  control_id: "CN-2",
  ttp_id: "LN-B",
  criterion: "DETECT",
  new_level: "high",
};

function columnItems(html: string, column: string): string[] {
  const section = html.split(`column-${column}`)[1] ?? "";
  const list = section.split("<ol>")[1]?.split("</ol>")[0] ?? "";
  return list.split("<li>").slice(1).map((item) => item.split("</li>")[0] ?? "");
}

describe("what-if sandbox", () => {
  it("echoes the committed content hash: a round-trip changes nothing", () => {
    const committedHash = detailFixture().content_hash;
    expect(whatifEmptyFixture().content_hash).toBe(committedHash);
    expect(whatifUpgradeFixture().content_hash).toBe(committedHash);
  });

  it("keeps the committed view untouched when a result arrives", () => {
    const before = loadedState();
    const committedControls = JSON.stringify(before.controls);
    const committedRanking = JSON.stringify(before.ranking);
    const after = applyWhatIf(before, whatifUpgradeFixture());
    expect(JSON.stringify(after.controls)).toBe(committedControls);
    expect(JSON.stringify(after.ranking)).toBe(committedRanking);
    expect(after.contentHash).toBe(before.contentHash);
    expect(sandboxHashMatches(after)).toBe(true);
  });

  it("reports no changes and identical rankings for an empty staged set", () => {
    const state = applyWhatIf(loadedState(), whatifEmptyFixture());
    const html = renderWhatIf(state);
    expect(html).toContain("No staged changes.");
    expect(html).toContain("no changes; rankings match the committed assessment");
    const committed = columnItems(html, "committed").map((i) => i.split(" <")[0]);
    const sandbox = columnItems(html, "sandbox").map((i) => i.split(" <")[0]);
    expect(sandbox).toEqual(committed);
    expect(html).not.toContain("paradox-alert");
  });

  it("shows the benefit chip straight from the response delta", () => {
    const state = applyWhatIf(stageChange(loadedState(), STAGED_UPGRADE), whatifUpgradeFixture());
    const html = renderWhatIf(state);
    const chip = html.split(`class="chip chip-benefit"`)[1]?.split("</span>")[0] ?? "";
    expect(chip).toContain("+4 benefit");
  });

  it("renders staged changes as visually distinct, discardable rows", () => {
    const html = renderWhatIf(stageChange(loadedState(), STAGED_UPGRADE));
    expect(html).toContain(`class="staged-change"`);
    expect(html).toContain("set CN-2 DETECT on LN-B to high");
    expect(html).toContain(`data-action="unstage"`);
  });

  it("shows both rankings side by side with per-control ratio deltas", () => {
    const state = applyWhatIf(stageChange(loadedState(), STAGED_UPGRADE), whatifUpgradeFixture());
    const html = renderWhatIf(state);
    const committed = columnItems(html, "committed");
    const sandbox = columnItems(html, "sandbox");
    expect(committed.map((i) => i.split(" <")[0])).toEqual(["CN-1", "CN-3", "CN-2"]);
    expect(sandbox.map((i) => i.split(" <")[0])).toEqual(["CN-1", "CN-2", "CN-3"]);
    const cn2 = sandbox[1] ?? "";
    expect(cn2).toContain(">4<");
    expect(cn2).toContain(">+2<");
    expect(sandbox[0]).toContain(">0<");
    expect(html).toContain("committed assessment untouched");
  });

  it("labels controls that only exist on one side instead of inventing a delta", () => {
    const paradoxDetail = loadFixture<AssessmentDetail>("paradox_assessment.json");
    const state = applyWhatIf(
      applyDetail(initialState(), paradoxDetail),
      whatifParadoxFixture(),
    );
    const html = renderWhatIf(state);
    const added = html.split("PD-PR")[1]?.split("</li>")[0] ?? "";
    expect(added).toContain("added or removed");
  });

  it("raises the paradox alert exactly when the response flags it", () => {
    const upgraded = applyWhatIf(loadedState(), whatifUpgradeFixture());
    expect(whatifUpgradeFixture().paradox).toBe(false);
    expect(renderWhatIf(upgraded)).not.toContain("paradox-alert");

    const paradoxDetail = loadFixture<AssessmentDetail>("paradox_assessment.json");
    const flagged = applyWhatIf(
      applyDetail(initialState(), paradoxDetail),
      whatifParadoxFixture(),
    );
    expect(whatifParadoxFixture().paradox).toBe(true);
    const html = renderWhatIf(flagged);
    expect(html).toContain("paradox-alert");
    expect(html).toContain("Risk paradox");
    expect(html).toContain("less detectable");
    expect(html).toContain("TX-A -&gt; srv-win -&gt; goal:1");
    expect(html).toContain("TX-B -&gt; srv-lin -&gt; goal:1");
    expect(html).toContain("detect coverage 8");
    expect(html).toContain("detect coverage 0");
  });

  it("turns a status conflict into actionable guidance", () => {
    const state = sandboxError(
      loadedState(),
      "assessment has no ranking yet; status is 'draft'; submit scores for every scoped TTP so the assessment reaches 'evaluated', then run the what-if again",
    );
    const html = renderWhatIf(state);
    expect(html).toContain("sandbox-error");
    expect(html).toContain("submit scores for every scoped TTP");
  });

  it("matches the snapshot with the upgrade result", () => {
    const state = applyWhatIf(stageChange(loadedState(), STAGED_UPGRADE), whatifUpgradeFixture());
    expect(renderWhatIf(state)).toMatchSnapshot();
  });

  it("matches the snapshot with the paradox result", () => {
    const paradoxDetail = loadFixture<AssessmentDetail>("paradox_assessment.json");
    const state = applyWhatIf(applyDetail(initialState(), paradoxDetail), whatifParadoxFixture());
    expect(renderWhatIf(state)).toMatchSnapshot();
  });
});
