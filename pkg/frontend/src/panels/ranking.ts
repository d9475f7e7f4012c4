/**
 * Committed rankings: TTP priorities and the control benefit/cost table.
 *
 * Rows follow the gateway's ranking order exactly and every figure is the
 * payload value verbatim; ordinals come from the ordered list markup, not
 * from counting on our side.
 */

import { esc } from "../html.js";
import type { EvaluationRow } from "../types.js";
import type { WorkbenchState } from "../state.js";

export function evaluationById(
  rows: EvaluationRow[],
  controlId: string,
): EvaluationRow | null {
  for (const row of rows) {
    if (row.control_id === controlId) return row;
  }
  return null;
}

export function renderRanking(state: WorkbenchState): string {
  const { ranking, controls } = state;
  if (!ranking && !controls) {
    return `<section class="ranking ranking-empty"><p>No ranking yet; the assessment is still in draft.</p></section>`;
  }

  let ttpList = "";
  if (ranking) {
    const items = ranking.ttp_ranking.map((ttpId) => {
      const aggregate = ranking.aggregates.find((row) => row.ttp_id === ttpId);
      const total = aggregate ? `<span class="weighted-total">${esc(aggregate.weighted_total)}</span>` : "";
      const divergence = aggregate?.divergence.length
        ? `<span class="badge badge-divergence">divergence: ${esc(
            aggregate.divergence.join(", "),
          )}</span>`
        : "";
      return `<li data-ttp="${esc(ttpId)}">${esc(ttpId)} ${total} ${divergence}</li>`;
    });
    ttpList = `<div class="ttp-ranking"><h3>TTP priorities</h3><ol>${items.join("")}</ol></div>`;
  }

  let controlTable = "";
  if (controls) {
    const items = controls.control_ranking.map((controlId) => {
      const row = evaluationById(controls.evaluations, controlId);
      if (!row) return `<li data-control="${esc(controlId)}">${esc(controlId)}</li>`;
      return `<li data-control="${esc(controlId)}">
        <span class="control-id">${esc(controlId)}</span>
        <span class="benefit">benefit ${esc(row.benefit)}</span>
        <span class="cost">cost ${esc(row.cost)}</span>
        <span class="ratio">ratio ${esc(row.ratio_display)}</span>
      </li>`;
    });
    controlTable = `<div class="control-ranking"><h3>Controls by benefit/cost</h3><ol>${items.join(
      "",
    )}</ol></div>`;
  }

  return `<section class="ranking">${ttpList}${controlTable}</section>`;
}
