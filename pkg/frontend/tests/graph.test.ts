import { describe, expect, it } from "vitest";

import { renderGraph } from "../src/panels/graph.js";
import { applyGraph, initialState } from "../src/state.js";
import { graphFixture, loadedState } from "./helpers.js";

/** Positions are presentational; strip them so assertions see structure only. */
function withoutLayout(html: string): string {
  return html.replaceAll(
    /\s(?:x|y|x1|y1|x2|y2|cx|cy|r|rx|ry|width|height|points|viewBox)="[^"]*"/g,
    "",
  );
}

function nodeMarkup(html: string, nodeId: string): string {
  return html.split(`data-node="${nodeId}"`)[1]?.split("</g>")[0] ?? "";
}

describe("graph panel", () => {
  it("renders every node and edge from the payload", () => {
    const html = renderGraph(loadedState());
    const graph = graphFixture();
    for (const node of graph.nodes) {
      expect(html).toContain(`data-node="${node.id}"`);
    }
    expect(html.split("<line").length).toBe(graph.edges.length + 1);
  });

  it("chooses the shape from the node kind", () => {
    const html = renderGraph(loadedState());
    expect(nodeMarkup(html, "actor:Fixture Actor")).toContain("<circle");
    expect(nodeMarkup(html, "goal:1")).toContain("<polygon");
    expect(nodeMarkup(html, "ws-edge")).toContain("<ellipse");
    expect(nodeMarkup(html, "LN-A")).toContain("<rect");
    expect(nodeMarkup(html, "TAW1")).toContain("<rect");
    expect(nodeMarkup(html, "LN-A")).toContain("node-technique");
    expect(nodeMarkup(html, "ws-edge")).toContain("node-asset");
  });

  it("labels nodes and classes edges by relation", () => {
    const html = renderGraph(loadedState());
    expect(html).toContain("Mailbox Rule Abuse");
    expect(html).toContain("Edge workstation");
    expect(html).toContain("edge-achieves");
    expect(html).toContain("edge-targets");
  });

  it("renders a placeholder before a graph loads", () => {
    expect(renderGraph(initialState())).toContain("No graph loaded.");
  });

  it("matches the structural snapshot with layout stripped", () => {
    const html = renderGraph(applyGraph(initialState(), graphFixture()));
    expect(withoutLayout(html)).toMatchSnapshot();
  });
});
