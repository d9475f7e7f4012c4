/**
 * Attack graph panel: renders the node-link payload as inline SVG with a
 * shape per node kind. Positions follow a simple kind-column grid; the
 * layout is presentational only and carries no assessment meaning.
 */

import { esc } from "../html.js";
import type { GraphNode } from "../types.js";
import type { WorkbenchState } from "../state.js";

const KIND_COLUMNS = [
  "threat_actor",
  "tactic",
  "technique",
  "sub_technique",
  "attack_pattern",
  "weakness",
  "vulnerability",
  "asset",
  "goal",
  "action",
] as const;

const COLUMN_STEP = 180;
const ROW_STEP = 90;
const MARGIN_X = 100;
const MARGIN_Y = 60;

type Point = { x: number; y: number };

function layout(nodes: GraphNode[]): Map<string, Point> {
  const columnOf = new Map<string, number>();
  for (const [index, kind] of KIND_COLUMNS.entries()) columnOf.set(kind, index);
  const usedColumns = new Set<number>();
  for (const node of nodes) usedColumns.add(columnOf.get(node.kind) ?? KIND_COLUMNS.length);
  const packed = new Map<number, number>();
  for (const [order, column] of [...usedColumns].sort((a, b) => a - b).entries()) {
    packed.set(column, order);
  }

  const points = new Map<string, Point>();
  const depth = new Map<number, number>();
  for (const node of nodes) {
    const column = packed.get(columnOf.get(node.kind) ?? KIND_COLUMNS.length) ?? 0;
    const row = depth.get(column) ?? 0;
    depth.set(column, row + 1);
    points.set(node.id, {
      x: MARGIN_X + column * COLUMN_STEP,
      y: MARGIN_Y + row * ROW_STEP,
    });
  }
  return points;
}

function shape(node: GraphNode, point: Point): string {
  const cls = `node node-${esc(node.kind)}`;
  const { x, y } = point;
  switch (node.kind) {
    case "threat_actor":
      return `<circle class="${cls}" cx="${x}" cy="${y}" r="26"/>`;
    case "goal": {
      const points = `${x},${y - 26} ${x + 34},${y} ${x},${y + 26} ${x - 34},${y}`;
      return `<polygon class="${cls}" points="${points}"/>`;
    }
    case "asset":
      return `<ellipse class="${cls}" cx="${x}" cy="${y}" rx="40" ry="22"/>`;
    case "attack_pattern":
    case "weakness":
    case "vulnerability":
      return `<ellipse class="${cls}" cx="${x}" cy="${y}" rx="36" ry="18"/>`;
    case "tactic":
      return `<rect class="${cls}" x="${x - 38}" y="${y - 18}" width="76" height="36" rx="14"/>`;
    default:
      return `<rect class="${cls}" x="${x - 42}" y="${y - 18}" width="84" height="36"/>`;
  }
}

export function renderGraph(state: WorkbenchState): string {
  const graph = state.graph;
  if (!graph) {
    return `<section class="graph graph-empty"><p>No graph loaded.</p></section>`;
  }
  const points = layout(graph.nodes);
  let maxX = 0;
  let maxY = 0;
  for (const point of points.values()) {
    if (point.x > maxX) maxX = point.x;
    if (point.y > maxY) maxY = point.y;
  }

  const edges = graph.edges.map((edge) => {
    const a = points.get(edge.from);
    const b = points.get(edge.to);
    if (!a || !b) return "";
    return `<line class="edge edge-${esc(edge.relation)}" x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}" data-confidence="${esc(edge.confidence)}"/>`;
  });
  const nodes = graph.nodes.map((node) => {
    const point = points.get(node.id);
    if (!point) return "";
    const label = node.label ? node.label : node.id;
    return `<g class="node-group" data-node="${esc(node.id)}" data-kind="${esc(node.kind)}">
      ${shape(node, point)}
      <text class="node-label" x="${point.x}" y="${point.y + 40}" text-anchor="middle">${esc(label)}</text>
    </g>`;
  });

  const width = maxX + MARGIN_X;
  const height = maxY + MARGIN_Y + 40;
  return `<section class="graph">
    <h3>Attack graph</h3>
    <svg viewBox="0 0 ${width} ${height}" width="${width}" height="${height}" role="img">
      ${edges.join("\n")}
      ${nodes.join("\n")}
    </svg>
  </section>`;
}
