/** Top-of-page banner for load errors, retries, and staleness warnings. */

import { esc } from "../html.js";
import type { WorkbenchState } from "../state.js";

export function renderBanner(state: WorkbenchState): string {
  if (!state.banner) return "";
  const { kind, text } = state.banner;
  const retry =
    kind === "retry"
      ? `<button type="button" class="banner-retry" data-action="retry">Retry</button>`
      : "";
  return `<div class="banner banner-${esc(kind)}" role="alert">${esc(text)}${retry}</div>`;
}
