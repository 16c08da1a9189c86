/**
 * Layered SVG rendering of a build graph.
 *
 * Nodes fall into columns by kind (patient, anatomy, findings, diagnoses,
 * treatments) so the clinical reading order runs left to right. The output
 * is a plain markup string: no canvas, no layout library, fully testable.
 */

import { GraphEdge, GraphPayload, ViolationPayload } from "./api.js";
import { escapeHtml } from "./review.js";

export const KIND_COLORS: Record<string, string> = {
  Patient: "#b4541e",
  AnatomicalStructure: "#a07d1c",
  AnatomicalFunction: "#7d5ba6",
  Symptom: "#b03a3a",
  Observation: "#2e6f9e",
  Value: "#6b7280",
  Diagnosis: "#2e8b57",
  Treatment: "#1d7a74",
  InstanceNode: "#445566",
};

const FALLBACK_COLOR = "#888888";

const COLUMNS: readonly (readonly string[])[] = [
  ["Patient"],
  ["AnatomicalStructure", "AnatomicalFunction"],
  ["Symptom", "Observation", "Value", "InstanceNode"],
  ["Diagnosis"],
  ["Treatment"],
];

const COLUMN_GAP = 250;
const ROW_GAP = 56;
const MARGIN_X = 130;
const MARGIN_Y = 60;
const NODE_RADIUS = 9;

export function kindColor(kind: string): string {
  return KIND_COLORS[kind] ?? FALLBACK_COLOR;
}

function columnOf(kind: string): number {
  const index = COLUMNS.findIndex((kinds) => kinds.includes(kind));
  // unknown kinds land with the findings rather than off-canvas
  return index === -1 ? 2 : index;
}

export interface NodePosition {
  x: number;
  y: number;
}

export interface Layout {
  positions: Map<string, NodePosition>;
  width: number;
  height: number;
}

/** Deterministic positions: column by kind, rows sorted by kind then id. */
export function layout(payload: GraphPayload): Layout {
  const columns: { id: string; kind: string }[][] = COLUMNS.map(() => []);
  const sorted = [...payload.nodes].sort((a, b) =>
    a.kind === b.kind ? (a.id < b.id ? -1 : 1) : a.kind < b.kind ? -1 : 1,
  );
  for (const node of sorted) {
    const column = columns[columnOf(node.kind)];
    if (column !== undefined) {
      column.push({ id: node.id, kind: node.kind });
    }
  }
  const positions = new Map<string, NodePosition>();
  let tallest = 0;
  columns.forEach((nodes, columnIndex) => {
    tallest = Math.max(tallest, nodes.length);
    nodes.forEach((node, rowIndex) => {
      positions.set(node.id, {
        x: MARGIN_X + columnIndex * COLUMN_GAP,
        y: MARGIN_Y + rowIndex * ROW_GAP,
      });
    });
  });
  return {
    positions,
    width: MARGIN_X * 2 + (COLUMNS.length - 1) * COLUMN_GAP,
    height: MARGIN_Y * 2 + Math.max(0, tallest - 1) * ROW_GAP,
  };
}

function renderEdge(edge: GraphEdge, positions: Map<string, NodePosition>): string {
  const src = positions.get(edge.src);
  const dst = positions.get(edge.dst);
  if (src === undefined || dst === undefined) {
    return "";
  }
  const midX = (src.x + dst.x) / 2;
  const midY = (src.y + dst.y) / 2;
  const dash = edge.literal ? ' stroke-dasharray="4 3"' : "";
  return (
    `<line x1="${src.x}" y1="${src.y}" x2="${dst.x}" y2="${dst.y}" ` +
    `class="edge" data-rel="${escapeHtml(edge.rel)}" stroke="#9aa0a6"${dash}/>` +
    `<text x="${midX}" y="${midY - 4}" class="edge-label" text-anchor="middle">` +
    `${escapeHtml(edge.rel)}</text>`
  );
}

function nodeLabel(id: string, label: string | null): string {
  if (label !== null && label !== "") {
    return label;
  }
  const colon = id.indexOf(":");
  return colon === -1 ? id : id.slice(colon + 1);
}

export function renderGraph(payload: GraphPayload): string {
  if (payload.nodes.length === 0) {
    return '<p class="canvas-hint">The graph is empty. Build a guideline to see its structure here.</p>';
  }
  const placed = layout(payload);
  const edges = payload.edges
    .map((edge) => renderEdge(edge, placed.positions))
    .filter((fragment) => fragment !== "")
    .join("\n    ");
  const nodes = payload.nodes
    .map((node) => {
      const position = placed.positions.get(node.id);
      if (position === undefined) {
        return "";
      }
      const title = `${node.id} (${node.kind}${node.concept === null ? "" : `, concept ${node.concept}`})`;
      return (
        `<g class="node" data-kind="${escapeHtml(node.kind)}">` +
        `<circle cx="${position.x}" cy="${position.y}" r="${NODE_RADIUS}" ` +
        `fill="${kindColor(node.kind)}"><title>${escapeHtml(title)}</title></circle>` +
        `<text x="${position.x}" y="${position.y - NODE_RADIUS - 4}" text-anchor="middle" ` +
        `class="node-label">${escapeHtml(nodeLabel(node.id, node.label))}</text></g>`
      );
    })
    .filter((fragment) => fragment !== "")
    .join("\n    ");
  return `<svg viewBox="0 0 ${placed.width} ${placed.height}" width="100%" role="img">
    ${edges}
    ${nodes}
  </svg>`;
}

export interface ValidationBadge {
  label: string;
  clean: boolean;
}

export function validationBadge(violations: ViolationPayload[]): ValidationBadge {
  const count = violations.length;
  return {
    label: count === 1 ? "1 violation" : `${count} violations`,
    clean: count === 0,
  };
}

export function renderBadge(violations: ViolationPayload[]): string {
  const badge = validationBadge(violations);
  return `<span class="badge ${badge.clean ? "clean" : "dirty"}">${escapeHtml(badge.label)}</span>`;
}

export function renderLegend(payload: GraphPayload): string {
  const kinds = [...new Set(payload.nodes.map((node) => node.kind))].sort();
  return kinds
    .map(
      (kind) =>
        `<span class="legend-entry"><span class="swatch" ` +
        `style="background:${kindColor(kind)}"></span>${escapeHtml(kind)}</span>`,
    )
    .join("\n");
}
