/**
 * Classification board: one lane per class, in fixed order.
 *
 * Empty lanes render with a zero count and a placeholder row so the
 * analyst can see at a glance that nothing landed there.
 */

import { esc } from "../html.js";
import { LANE_ORDER, LANE_TITLES, type WorkbenchState } from "../state.js";

export function renderLanes(state: WorkbenchState): string {
  if (!state.lanes) {
    return `<section class="lanes lanes-empty"><p>No assessment loaded.</p></section>`;
  }
  const lanes = LANE_ORDER.map((key) => {
    const rows = state.lanes![key];
    const cards = rows.map((row) => {
      const scoped = state.scopedTtps.includes(row.ttp_id)
        ? `<span class="tag tag-scoped">scoped</span>`
        : "";
      return `<li class="ttp-card" data-ttp="${esc(row.ttp_id)}">
        <span class="ttp-id">${esc(row.ttp_id)}</span>
        <span class="sphere sphere-${esc(row.sphere)}">${esc(row.sphere)}</span>
        ${scoped}
        <span class="rationale">${esc(row.rationale.join("; "))}</span>
      </li>`;
    });
    const body = cards.length
      ? `<ul class="lane-cards">${cards.join("\n")}</ul>`
      : `<p class="lane-placeholder">none</p>`;
    return `<section class="lane lane-${esc(key)}">
      <h3>${esc(LANE_TITLES[key])} <span class="lane-count">${rows.length}</span></h3>
      ${body}
    </section>`;
  });
  const mode = state.mode ? `<p class="board-mode">mode: ${esc(state.mode)}</p>` : "";
  return `<section class="lanes">${mode}\n${lanes.join("\n")}</section>`;
}
