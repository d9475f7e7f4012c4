/**
 * Browser entry point: owns the single state value, re-renders every
 * panel after each transition, and translates DOM events into the pure
 * operations. There is no logic here beyond wiring.
 */

import { loadAssessmentView, runWhatIf, submitScores } from "./app.js";
import { GatewayClient } from "./client.js";
import { renderBanner } from "./panels/banner.js";
import { renderGraph } from "./panels/graph.js";
import { renderLanes } from "./panels/lanes.js";
import { renderMatrix } from "./panels/matrix.js";
import { renderRanking } from "./panels/ranking.js";
import { renderScoreForm } from "./panels/scoreForm.js";
import { renderWhatIf } from "./panels/whatif.js";
import {
  initialState,
  openScoreForm,
  setAssessor,
  setScoreValue,
  unstageChange,
  type WorkbenchState,
} from "./state.js";

const client = new GatewayClient({ baseUrl: "", actor: "workbench" });
let state: WorkbenchState = initialState();
let lastLoadedId = "";

function render(): void {
  const app = document.querySelector("#app");
  if (!app) return;
  app.innerHTML = [
    renderBanner(state),
    renderLanes(state),
    renderScoreForm(state),
    renderRanking(state),
    renderMatrix(state),
    renderWhatIf(state),
    renderGraph(state),
  ].join("\n");
}

function update(next: WorkbenchState): void {
  state = next;
  render();
}

async function load(id: string): Promise<void> {
  lastLoadedId = id;
  update(await loadAssessmentView(client, state, id));
}

document.addEventListener("click", (event) => {
  const target = event.target as HTMLElement | null;
  if (!target) return;
  const card = target.closest<HTMLElement>(".ttp-card");
  if (card?.dataset.ttp) {
    update(openScoreForm(state, card.dataset.ttp));
    return;
  }
  switch (target.dataset.action) {
    case "retry":
      if (lastLoadedId) void load(lastLoadedId);
      break;
    case "submit-scores":
      void submitScores(client, state).then(update);
      break;
    case "run-whatif":
      void runWhatIf(client, state).then(update);
      break;
    case "unstage": {
      const index = target.dataset.index;
      if (index !== undefined) update(unstageChange(state, JSON.parse(index) as number));
      break;
    }
  }
});

document.addEventListener("change", (event) => {
  const input = event.target as HTMLInputElement | null;
  if (!input) return;
  if (input.name === "assessor_id") {
    state = setAssessor(state, input.value);
    return;
  }
  if (input.type === "radio" && input.name) {
    state = setScoreValue(state, input.name, input.value);
  }
});

const form = document.querySelector<HTMLFormElement>("#load-form");
form?.addEventListener("submit", (event) => {
  event.preventDefault();
  const input = form.querySelector<HTMLInputElement>("input[name=assessment_id]");
  if (input?.value) void load(input.value);
});

render();
