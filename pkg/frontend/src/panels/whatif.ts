/**
 * What-if sandbox: staged control changes, the gateway's hypothetical
 * evaluation beside the committed one, and the risk paradox alert.
 *
 * The committed column always re-reads the stored ranking payload, so a
 * sandbox run can never bleed into it; the isolation note compares the
 * content hash echoed by the what-if endpoint against the one loaded
 * with the assessment.
 */

import { esc, signed } from "../html.js";
import type { AttackPathWire } from "../types.js";
import { describeChange, sandboxHashMatches, type WorkbenchState } from "../state.js";
import { evaluationById } from "./ranking.js";

function pathLine(label: string, path: AttackPathWire | null): string {
  if (!path) {
    return `<p class="replan-path"><strong>${esc(label)}:</strong> no viable path</p>`;
  }
  return `<p class="replan-path"><strong>${esc(label)}:</strong> ${esc(
    path.nodes.join(" -> "),
  )} (propensity ${esc(path.propensity)}, detect coverage ${esc(path.detect_coverage)})</p>`;
}

export function renderWhatIf(state: WorkbenchState): string {
  const { staged, result, error } = state.sandbox;

  const stagedItems = staged.map(
    (change, index) => `<li class="staged-change">
      <span class="staged-label">${esc(describeChange(change))}</span>
      <button type="button" data-action="unstage" data-index="${esc(index)}">discard</button>
    </li>`,
  );
  const stagedHtml = stagedItems.length
    ? `<ul class="staged-changes">${stagedItems.join("")}</ul>`
    : `<p class="staged-none">No staged changes.</p>`;

  const errorHtml = error
    ? `<div class="sandbox-error" role="alert">${esc(error)}</div>`
    : "";

  let resultHtml = "";
  if (result) {
    const paradox = result.paradox
      ? `<div class="paradox-alert" role="alert">
          <strong>Risk paradox</strong>: this change pushes the adversary onto a less detectable route.
          ${pathLine("before", result.replan.old_path)}
          ${pathLine("after", result.replan.new_path)}
        </div>`
      : "";

    const chips = result.changes.map(
      (change) => `<span class="chip chip-benefit" data-change="${esc(change.op)}">
        ${esc(signed(change.benefit_delta))} benefit
      </span>`,
    );
    const chipsHtml = chips.length
      ? `<div class="change-chips">${chips.join("")}</div>`
      : `<p class="no-changes">no changes; rankings match the committed assessment</p>`;

    const committed = state.controls
      ? state.controls.control_ranking.map((controlId) => {
          const row = evaluationById(state.controls!.evaluations, controlId);
          return `<li>${esc(controlId)} <span class="ratio">${esc(
            row ? row.ratio_display : "",
          )}</span></li>`;
        })
      : [];
    const hypothetical = result.control_ranking.map((controlId) => {
      const row = evaluationById(result.evaluations, controlId);
      const delta = result.ratio_deltas[controlId];
      const deltaHtml =
        delta === null || delta === undefined
          ? `<span class="ratio-delta ratio-delta-new">added or removed</span>`
          : `<span class="ratio-delta">${esc(signed(delta))}</span>`;
      return `<li>${esc(controlId)} <span class="ratio">${esc(
        row ? row.ratio_display : "",
      )}</span> ${deltaHtml}</li>`;
    });

    const isolation = sandboxHashMatches(state)
      ? `<p class="isolation-note">committed assessment untouched (content hash ${esc(
          result.content_hash.slice(0, 12),
        )} unchanged)</p>`
      : `<p class="isolation-note isolation-warning">committed assessment hash differs; reload before trusting this comparison</p>`;

    resultHtml = `<div class="whatif-result">
      ${paradox}
      ${chipsHtml}
      <div class="side-by-side">
        <div class="column column-committed"><h4>Committed</h4><ol>${committed.join("")}</ol></div>
        <div class="column column-sandbox"><h4>With staged changes</h4><ol>${hypothetical.join(
          "",
        )}</ol></div>
      </div>
      ${isolation}
    </div>`;
  }

  return `<section class="whatif">
    <h3>What-if sandbox</h3>
    ${stagedHtml}
    <button type="button" class="run-whatif" data-action="run-whatif">Evaluate staged changes</button>
    ${errorHtml}
    ${resultHtml}
  </section>`;
}
