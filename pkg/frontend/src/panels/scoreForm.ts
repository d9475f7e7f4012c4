/**
 * Score entry form for one TTP: all rubric criteria, each on a 1..5
 * scale, with the rubric anchor text as the option tooltip.
 *
 * Validation problems highlight the offending criterion; gateway
 * findings from a rejected submission render inline in the same spot.
 * When aggregates exist, their mean, range, and divergence flags come
 * straight from the ranking payload.
 */

import { esc } from "../html.js";
import { aggregateFor, type WorkbenchState } from "../state.js";

const SCALE_LABELS = ["1", "2", "3", "4", "5"] as const;

export function renderScoreForm(state: WorkbenchState): string {
  const { rubric, scoreForm } = state;
  if (!rubric || !scoreForm.ttpId) {
    return `<section class="score-form score-form-empty"><p>Select a TTP to score.</p></section>`;
  }
  const ttpId = scoreForm.ttpId;
  const aggregate = aggregateFor(state, ttpId);

  const rows = rubric.criteria.map((criterion) => {
    const chosen = scoreForm.values[criterion.id];
    const options = criterion.anchors.map((anchor, index) => {
      const label = SCALE_LABELS[index] ?? "";
      const checked = chosen === label ? " checked" : "";
      return `<label class="scale-option" title="${esc(anchor)}">
        <input type="radio" name="${esc(criterion.id)}" value="${esc(label)}"${checked}>
        ${esc(label)}
      </label>`;
    });

    const problem = scoreForm.problems[criterion.id];
    const problemHtml = problem
      ? `<p class="criterion-problem">${esc(problem)}</p>`
      : "";
    const findings = scoreForm.serverFindings[criterion.id] ?? [];
    const findingsHtml = findings.length
      ? `<ul class="criterion-findings">${findings
          .map((f) => `<li>${esc(f)}</li>`)
          .join("")}</ul>`
      : "";

    let aggregateHtml = "";
    if (aggregate) {
      const badge = aggregate.divergence.includes(criterion.id)
        ? `<span class="badge badge-divergence">divergence</span>`
        : "";
      aggregateHtml = `<span class="criterion-aggregate">mean ${esc(
        aggregate.means[criterion.id],
      )}, range ${esc(aggregate.ranges[criterion.id])} ${badge}</span>`;
    }

    const flagged = problem || findings.length ? " has-problem" : "";
    return `<fieldset class="criterion${flagged}" data-criterion="${esc(criterion.id)}">
      <legend>${esc(criterion.id)}: ${esc(criterion.question)}</legend>
      <div class="scale">${options.join("\n")}</div>
      ${aggregateHtml}${problemHtml}${findingsHtml}
    </fieldset>`;
  });

  const last = scoreForm.lastResponse;
  const receipt = last
    ? `<p class="submit-receipt">accepted ${esc(last.accepted)} score(s); status ${esc(
        last.status,
      )}${
        last.missing_scoped_ttps.length
          ? `; still unscored: ${esc(last.missing_scoped_ttps.join(", "))}`
          : ""
      }</p>`
    : "";

  const assessorProblem = scoreForm.problems["assessor_id"]
    ? `<p class="criterion-problem">${esc(scoreForm.problems["assessor_id"])}</p>`
    : "";

  return `<section class="score-form" data-ttp="${esc(ttpId)}">
    <h3>Score ${esc(ttpId)}</h3>
    <label class="assessor">Assessor
      <input type="text" name="assessor_id" value="${esc(scoreForm.assessorId)}">
    </label>
    ${assessorProblem}
    ${rows.join("\n")}
    <button type="button" class="submit-scores" data-action="submit-scores">Submit scores</button>
    ${receipt}
  </section>`;
}
