/**
 * Report screen: measures with expense totals, the consequence breakdown,
 * propositions, and decision tables with a criterion toggle.
 *
 * The console does no domain math. Every money figure is printed verbatim
 * from the API's amount strings, and the criterion toggle re-requests the
 * choice from the gateway rather than re-ranking locally. Reports with an
 * unsupported schema version fall back to raw JSON.
 */

import { escapeHtml } from "./intake.js";
import type {
  ChoiceResponse,
  Consequences,
  DecisionTablePayload,
  Measure,
  Money,
  Proposition,
  Report,
  ExpenseSheet,
} from "./types.js";
import { SUPPORTED_SCHEMA_VERSIONS } from "./types.js";

export function renderMoney(money: Money): string {
  // verbatim: the amount string is not parsed or reformatted
  return `<span class="money">${escapeHtml(money.amount)}&nbsp;${escapeHtml(money.currency)}</span>`;
}

function renderExpenseSheet(sheet: ExpenseSheet): string {
  const items = sheet.items
    .map(
      (item) =>
        `<tr><td>${escapeHtml(item.label)}</td><td>${item.quantity}</td><td>${renderMoney(item.unit_cost)}</td><td>${renderMoney(item.amount)}</td></tr>`,
    )
    .join("");
  return `<table class="expenses"><thead><tr><th>item</th><th>qty</th><th>unit</th><th>amount</th></tr></thead><tbody>${items}</tbody><tfoot><tr><th colspan="3">total</th><th>${renderMoney(sheet.total)}</th></tr></tfoot></table>`;
}

export function renderMeasures(measures: Measure[], expenseTotal?: ExpenseSheet): string {
  const rows = measures
    .map(
      (measure) => `<li class="measure" data-measure="${escapeHtml(measure.id)}">
  <strong>${escapeHtml(measure.id)}</strong> ${escapeHtml(measure.description)}
  <span class="days">day ${measure.start_day} to ${measure.end_day}</span>
  ${measure.prerequisites.length ? `<span class="prereqs">after ${measure.prerequisites.map(escapeHtml).join(", ")}</span>` : ""}
  ${renderExpenseSheet(measure.expenses)}
</li>`,
    )
    .join("");
  const total = expenseTotal
    ? `<p class="expense-total">restoration total: ${renderMoney(expenseTotal.total)}</p>`
    : "";
  return `<section class="measures"><h2>restoration measures</h2><ol>${rows}</ol>${total}</section>`;
}

export function renderConsequences(consequences: Consequences): string {
  const lost = consequences.lost_output
    .map(
      (row) =>
        `<tr><td>${escapeHtml(row.asset)}</td><td>${escapeHtml(row.product)}</td><td>${row.volume}&nbsp;${escapeHtml(row.unit)}</td><td>${row.downtime_days}</td></tr>`,
    )
    .join("");
  const unquantified = consequences.unquantified.length
    ? `<p class="unquantified">unquantified: ${consequences.unquantified.map(escapeHtml).join("; ")}</p>`
    : "";
  return `<section class="consequences"><h2>consequences</h2>
<table class="lost-output"><thead><tr><th>asset</th><th>product</th><th>lost output</th><th>downtime days</th></tr></thead><tbody>${lost}</tbody></table>
<dl>
  <dt>sale volume change</dt><dd>${renderMoney(consequences.sale_volume_change)}</dd>
  <dt>penalty sanctions</dt><dd>${renderMoney(consequences.penalties)}</dd>
  <dt>account payable increase</dt><dd>${renderMoney(consequences.account_payable_increase)}</dd>
  <dt>total</dt><dd>${renderMoney(consequences.total)}</dd>
</dl>${unquantified}</section>`;
}

export function renderPropositions(propositions: Proposition[]): string {
  if (!propositions.length) return "";
  const rows = propositions
    .map(
      (p) =>
        `<li class="proposition kind-${escapeHtml(p.kind)}"><span class="kind">${escapeHtml(p.kind)}</span> ${escapeHtml(p.description)} <span class="evidence">${p.evidence.map(escapeHtml).join(", ")}</span></li>`,
    )
    .join("");
  return `<section class="propositions"><h2>propositions</h2><ul>${rows}</ul></section>`;
}

export const CRITERIA = ["pessimistic", "optimistic", "pragmatic"] as const;

/**
 * Decision table with the API-chosen variant highlighted. `choice` must come
 * from the report or from POST /v1/choices; the renderer only displays it.
 */
export function renderDecisionTable(
  table: DecisionTablePayload,
  choice: ChoiceResponse,
): string {
  const header = table.situations.map((s) => `<th>${escapeHtml(s)}</th>`).join("");
  const probabilities = table.probabilities
    ? `<tr class="probabilities"><th>P</th>${table.probabilities.map((p) => `<td>${p}</td>`).join("")}<td></td></tr>`
    : "";
  const rows = table.variants
    .map((variant, index) => {
      const chosen = index === choice.variant_index;
      const cells = table.values[index].map((v) => `<td>${v}</td>`).join("");
      return `<tr class="${chosen ? "chosen" : ""}" data-variant="${escapeHtml(variant)}"><th>${escapeHtml(variant)}</th>${cells}<td class="criterion-value">${choice.per_variant[index]}</td></tr>`;
    })
    .join("");
  const toggle = CRITERIA.map(
    (criterion) =>
      `<button class="criterion${criterion === choice.criterion ? " active" : ""}" data-criterion="${criterion}">${criterion}</button>`,
  ).join("");
  return `<section class="decision-table">
<div class="criterion-toggle">${toggle}</div>
<table><thead><tr><th></th>${header}<th>${escapeHtml(choice.criterion)}</th></tr></thead><tbody>${probabilities}${rows}</tbody></table>
<p class="choice">chosen: <strong>${escapeHtml(choice.variant)}</strong> (value ${choice.value})</p>
</section>`;
}

function renderThreat(report: Report): string {
  if (!report.threat) return "";
  const preventive = report.preventive
    ? `<ul>${(report.preventive.proposals ?? []).map((p) => `<li>${escapeHtml(p)}</li>`).join("")}</ul>`
    : "";
  return `<section class="threat"><h2>threat</h2>
<p>probability ${report.threat.probability} (${escapeHtml(report.threat.level)}, via ${escapeHtml(report.threat.method)})</p>${preventive}</section>`;
}

function renderSectionJson(title: string, payload: unknown): string {
  return `<section class="raw-section"><h2>${escapeHtml(title)}</h2><pre>${escapeHtml(JSON.stringify(payload, null, 2))}</pre></section>`;
}

export function renderRawFallback(report: Report): string {
  return `<section class="raw-fallback"><p class="warning">unsupported report schema version ${report.schema_version}; showing raw JSON</p><pre>${escapeHtml(JSON.stringify(report, null, 2))}</pre></section>`;
}

export interface ReportRenderOptions {
  /** Choice to display for the market consequence table (from the API). */
  consequenceChoice?: ChoiceResponse;
}

export function renderReport(report: Report, options: ReportRenderOptions = {}): string {
  if (!SUPPORTED_SCHEMA_VERSIONS.includes(report.schema_version)) {
    return renderRawFallback(report);
  }
  const parts: string[] = [];
  parts.push(
    `<header class="report-head"><h1>${escapeHtml(report.category)} / ${escapeHtml(report.subtype)}</h1>${report.branch ? `<span class="branch">${escapeHtml(report.branch)}</span>` : ""}</header>`,
  );
  parts.push(renderThreat(report));
  if (report.measures) parts.push(renderMeasures(report.measures, report.expense_total));
  if (report.consequences) parts.push(renderConsequences(report.consequences));
  if (report.market) {
    const consequences = report.market.consequences;
    if (consequences && consequences.table && consequences.per_variant) {
      const choice = options.consequenceChoice ?? (consequences as ChoiceResponse);
      parts.push(renderDecisionTable(consequences.table as DecisionTablePayload, choice));
    }
    const rest = { ...report.market };
    delete (rest as Record<string, unknown>).consequences;
    parts.push(renderSectionJson("market assessment", rest));
  }
  if (report.regional) parts.push(renderSectionJson("regional assessment", report.regional));
  parts.push(renderPropositions(report.propositions));
  if (report.warnings.length) {
    parts.push(
      `<section class="warnings"><h2>warnings</h2><ul>${report.warnings.map((w) => `<li>${escapeHtml(w)}</li>`).join("")}</ul></section>`,
    );
  }
  return parts.filter((part) => part.length > 0).join("\n");
}
