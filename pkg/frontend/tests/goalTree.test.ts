import { describe, expect, it } from "vitest";

import { displayOrder, renderGoalTree, renderedOrder } from "../src/goalTree.js";
import type { TraceNode } from "../src/types.js";
import { fixture } from "./helpers.js";

describe("goal-tree view", () => {
  it("presents nodes in exactly the trace order", () => {
    const trace = fixture<TraceNode>("production_trace.json");
    const order = displayOrder(trace).map((node) => node.preorder);
    expect(order).toEqual([...order].sort((a, b) => a - b));
    expect(order[0]).toBe(0);
    const html = renderGoalTree(trace);
    expect(renderedOrder(html)).toEqual(order);
  });

  it("collapsing a node hides its children but keeps the order of the rest", () => {
    const trace = fixture<TraceNode>("production_trace.json");
    const withChildren = displayOrder(trace).find((node) => node.children.length > 0)!;
    const collapsed = new Set([withChildren.preorder]);
    const html = renderGoalTree(trace, collapsed);
    const visible = renderedOrder(html);
    const hidden = displayOrder(withChildren)
      .map((node) => node.preorder)
      .filter((preorder) => preorder !== withChildren.preorder);
    for (const preorder of hidden) expect(visible).not.toContain(preorder);
    expect(visible).toContain(withChildren.preorder);
    expect(visible).toEqual([...visible].sort((a, b) => a - b));
  });

  it("badges statuses", () => {
    const trace = fixture<TraceNode>("ask_trace.json");
    const html = renderGoalTree(trace);
    expect(html).toContain("status-proven");
    expect(html).toContain("builtin");
  });
});
