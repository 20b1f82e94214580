/**
 * Goal-tree view: a collapsible list that preserves the trace's child order
 * exactly (top-down, left-to-right), with a status badge per node.
 */

import { escapeHtml } from "./intake.js";
import type { TraceNode } from "./types.js";

/** Nodes in the order the view presents them; equals the trace's preorder. */
export function displayOrder(root: TraceNode): TraceNode[] {
  const out: TraceNode[] = [];
  const walk = (node: TraceNode) => {
    out.push(node);
    for (const child of node.children) walk(child);
  };
  walk(root);
  return out;
}

const BADGES: Record<TraceNode["status"], string> = {
  proven: "&#10003;",
  failed: "&#10007;",
  pending: "&#8230;",
};

export function renderGoalTree(root: TraceNode, collapsed: Set<number> = new Set()): string {
  const renderNode = (node: TraceNode): string => {
    const isCollapsed = collapsed.has(node.preorder);
    const toggle =
      node.children.length > 0
        ? `<button class="toggle" data-toggle="${node.preorder}">${isCollapsed ? "+" : "-"}</button>`
        : "";
    const children =
      node.children.length > 0 && !isCollapsed
        ? `<ul>${node.children.map(renderNode).join("")}</ul>`
        : "";
    const clause = node.clause === null ? "" : ` <span class="clause">#${node.clause}</span>`;
    const builtin = node.builtin ? ` <span class="builtin">builtin</span>` : "";
    return `<li data-preorder="${node.preorder}" class="status-${node.status}">${toggle}<span class="badge">${BADGES[node.status]}</span> <code>${escapeHtml(node.goal)}</code>${clause}${builtin}${children}</li>`;
  };
  return `<ul class="goal-tree">${renderNode(root)}</ul>`;
}

/** The preorder indices in the order they appear in the rendered HTML. */
export function renderedOrder(html: string): number[] {
  const out: number[] = [];
  const pattern = /data-preorder="(\d+)"/g;
  let match: RegExpExecArray | null;
  while ((match = pattern.exec(html)) !== null) {
    out.push(Number(match[1]));
  }
  return out;
}
