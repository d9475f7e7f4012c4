/**
 * Workbench operations: each one talks to the gateway through the typed
 * client and folds the responses into state in arrival order. All error
 * handling funnels through here so panels stay pure.
 */

import { GatewayClient, GatewayError } from "./client.js";
import {
  applyClassifications,
  applyControlRanking,
  applyDetail,
  applyGraph,
  applyRanking,
  applyScoreAccepted,
  applyScoreFindings,
  applyWhatIf,
  clearView,
  markProblems,
  sandboxError,
  validateScoreForm,
  withBanner,
  type WorkbenchState,
} from "./state.js";

function asGatewayError(err: unknown): GatewayError {
  if (err instanceof GatewayError) return err;
  return new GatewayError(0, `unexpected failure: ${String(err)}`);
}

/**
 * Load one assessment into the board: detail (rubric, status, hash),
 * classification lanes, the attack graph, and, once the pipeline has
 * run, both rankings. A 404 or an unreachable gateway clears the view
 * so no stale data lingers behind the banner.
 */
export async function loadAssessmentView(
  client: GatewayClient,
  state: WorkbenchState,
  assessmentId: string,
): Promise<WorkbenchState> {
  try {
    const detail = await client.getAssessment(assessmentId);
    let next = applyDetail(clearView(state), detail);
    next = applyClassifications(next, await client.getClassifications(assessmentId));
    next = applyGraph(next, await client.getGraph(assessmentId));
    if (detail.status !== "draft") {
      next = applyRanking(next, await client.getRanking(assessmentId));
      next = applyControlRanking(next, await client.getControlRanking(assessmentId));
    }
    return next;
  } catch (err) {
    const gateway = asGatewayError(err);
    if (gateway.status === 404) {
      return withBanner(clearView(state), {
        kind: "error",
        text: `assessment '${assessmentId}' not found`,
      });
    }
    if (gateway.status === 0) {
      return withBanner(clearView(state), {
        kind: "retry",
        text: "gateway unreachable; check the connection and retry",
      });
    }
    return withBanner(clearView(state), { kind: "error", text: gateway.message });
  }
}

/**
 * Submit the open score form. Incomplete or out-of-range values never
 * leave the browser; they highlight the offending criterion instead.
 * Gateway findings from a 400 land inline the same way. A submission
 * that completes the panel flips the assessment to evaluated, so the
 * rankings are refetched to pick up the new aggregates.
 */
export async function submitScores(
  client: GatewayClient,
  state: WorkbenchState,
): Promise<WorkbenchState> {
  const { rubric, scoreForm, assessmentId } = state;
  if (!rubric || !scoreForm.ttpId || !assessmentId) return state;

  const problems: Record<string, string> = {};
  if (!scoreForm.assessorId.trim()) {
    problems["assessor_id"] = "assessor id is required";
  }
  const checked = validateScoreForm(rubric, scoreForm.values);
  Object.assign(problems, checked.problems);
  if (Object.keys(problems).length) {
    return markProblems(state, problems);
  }

  try {
    const response = await client.submitScores(assessmentId, [
      {
        assessor_id: scoreForm.assessorId.trim(),
        ttp_id: scoreForm.ttpId,
        values: checked.values,
      },
    ]);
    let next = applyScoreAccepted(state, response);
    if (response.status !== "draft") {
      next = applyRanking(next, await client.getRanking(assessmentId));
      next = applyControlRanking(next, await client.getControlRanking(assessmentId));
    }
    return next;
  } catch (err) {
    const gateway = asGatewayError(err);
    if (gateway.status === 400 && gateway.findings.length) {
      return applyScoreFindings(state, gateway.findings);
    }
    if (gateway.status === 0) {
      return withBanner(state, {
        kind: "retry",
        text: "gateway unreachable; the scores were not submitted",
      });
    }
    return withBanner(state, { kind: "error", text: gateway.message });
  }
}

/**
 * Evaluate the staged sandbox changes. The committed view is never
 * touched; the hypothetical result renders beside it. A 409 turns into
 * guidance about finishing the scoring first.
 */
export async function runWhatIf(
  client: GatewayClient,
  state: WorkbenchState,
): Promise<WorkbenchState> {
  if (!state.assessmentId) return state;
  try {
    const result = await client.runWhatIf(state.assessmentId, state.sandbox.staged);
    return applyWhatIf(state, result);
  } catch (err) {
    const gateway = asGatewayError(err);
    if (gateway.status === 409) {
      return sandboxError(
        state,
        `${gateway.message}; submit scores for every scoped TTP so the assessment reaches 'evaluated', then run the what-if again`,
      );
    }
    if (gateway.status === 0) {
      return withBanner(state, {
        kind: "retry",
        text: "gateway unreachable; the what-if was not evaluated",
      });
    }
    return sandboxError(state, gateway.message);
  }
}
