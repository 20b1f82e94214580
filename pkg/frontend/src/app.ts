/**
 * Browser bootstrap: wires the intake form, the question panel, the report
 * view and the goal tree into the page. All state lives in SessionController;
 * this module only moves it in and out of the DOM.
 */

import { ApiError, GatewayClient, fieldErrors } from "./api.js";
import { renderGoalTree } from "./goalTree.js";
import {
  EventForm,
  emptyForm,
  escapeHtml,
  eventDocument,
  renderIntakeForm,
  validateForm,
} from "./intake.js";
import { CRITERIA, renderDecisionTable, renderReport } from "./report.js";
import { SessionController } from "./session.js";
import type { ChoiceResponse, DecisionTablePayload } from "./types.js";

export function startConsole(rootId = "console", baseUrl = ""): void {
  const root = document.getElementById(rootId);
  if (!root) throw new Error(`no #${rootId} element`);
  const client = new GatewayClient(baseUrl || window.location.origin);
  const controller = new SessionController(client);
  const collapsed = new Set<number>();
  let form: EventForm = emptyForm();
  let consequenceChoice: ChoiceResponse | undefined;

  const readForm = (): EventForm => {
    const element = document.getElementById("intake") as HTMLFormElement | null;
    if (!element) return form;
    const data = new FormData(element);
    const get = (name: string) => String(data.get(name) ?? "");
    return {
      id: get("id"),
      category: get("category"),
      subtype: get("subtype"),
      status: get("status") || "occurred",
      timestamp: get("timestamp"),
      title: get("title"),
      narrative: get("narrative"),
      tags: get("tags"),
      affectedAssets: get("affectedAssets"),
      measurements: get("measurements"),
    };
  };

  const render = (): void => {
    const view = controller.view;
    const parts: string[] = [];
    if (view.banner) {
      parts.push(
        `<div class="banner">${escapeHtml(view.banner)} <button id="retry">retry</button></div>`,
      );
    }
    if (view.phase === "idle") {
      parts.push(renderIntakeForm(form, new Map()));
    } else {
      parts.push(
        `<p class="status">session <code>${escapeHtml(view.session?.id ?? "")}</code>: ${escapeHtml(view.phase)} (${Math.round(controller.elapsedSeconds())}s)</p>`,
      );
      const history = view.history
        .map(
          (entry) =>
            `<li>${escapeHtml(entry.question.text)} <strong>${escapeHtml(entry.answer ?? "...")}</strong></li>`,
        )
        .join("");
      parts.push(`<ol class="history">${history}</ol>`);
      if (view.staleQuestion) {
        parts.push(`<div class="stale">another operator answered first; question refreshed</div>`);
      }
      if (view.phase === "awaiting-answer" && view.session?.question) {
        parts.push(`<div class="question"><p>${escapeHtml(view.session.question.text)}</p>
<button id="answer-yes">yes</button> <button id="answer-no">no</button></div>`);
      }
      if (view.report) {
        parts.push(renderReport(view.report, { consequenceChoice }));
      }
      if (view.trace) {
        parts.push(`<section class="trace"><h2>goal tree</h2>${renderGoalTree(view.trace, collapsed)}</section>`);
      }
      if (view.phase === "failed") {
        parts.push(`<div class="failed">session failed: ${escapeHtml(view.session?.error ?? "")}</div>`);
      }
    }
    root.innerHTML = parts.join("\n");
    wire();
  };

  const wire = (): void => {
    const intake = document.getElementById("intake") as HTMLFormElement | null;
    if (intake) {
      intake.addEventListener("submit", (submitEvent) => {
        submitEvent.preventDefault();
        form = readForm();
        const errors = validateForm(form);
        if (errors.size > 0) {
          root.querySelector("form")!.outerHTML = renderIntakeForm(form, errors);
          wire();
          return;
        }
        controller
          .start(form.category, eventDocument(form))
          .then(render)
          .catch((error) => {
            if (error instanceof ApiError && error.status === 422) {
              root.querySelector("form")!.outerHTML = renderIntakeForm(form, fieldErrors(error));
              wire();
            } else {
              render();
            }
          });
      });
      const categorySelect = intake.querySelector('select[name="category"]');
      categorySelect?.addEventListener("change", () => {
        form = readForm();
        form.subtype = "";
        render();
      });
    }
    document.getElementById("retry")?.addEventListener("click", () => {
      controller.refresh().then(render);
    });
    document.getElementById("answer-yes")?.addEventListener("click", () => {
      controller.answer("yes").then(render).catch(render);
    });
    document.getElementById("answer-no")?.addEventListener("click", () => {
      controller.answer("no").then(render).catch(render);
    });
    for (const button of Array.from(root.querySelectorAll("button.toggle"))) {
      button.addEventListener("click", () => {
        const preorder = Number((button as HTMLButtonElement).dataset.toggle);
        if (collapsed.has(preorder)) collapsed.delete(preorder);
        else collapsed.add(preorder);
        render();
      });
    }
    for (const button of Array.from(root.querySelectorAll("button.criterion"))) {
      button.addEventListener("click", () => {
        const criterion = (button as HTMLButtonElement).dataset.criterion ?? CRITERIA[0];
        const table = controller.view.report?.market?.consequences?.table as
          | DecisionTablePayload
          | undefined;
        if (!table) return;
        client.evaluateChoice(table, criterion).then((choice) => {
          consequenceChoice = choice;
          const section = root.querySelector("section.decision-table");
          if (section) {
            section.outerHTML = renderDecisionTable(table, choice);
            wire();
          }
        });
      });
    }
  };

  render();
}
