/**
 * Event intake form: client-side validation of the category/subtype pairs
 * (the same rules the gateway enforces; the table is generated from it),
 * plus rendering. Invalid forms never reach the network.
 */

import { CATEGORY_SUBTYPES, EVENT_STATUSES } from "./types.js";

export interface EventForm {
  id: string;
  category: string;
  subtype: string;
  status: string;
  timestamp: string;
  title: string;
  narrative: string;
  tags: string;           // comma separated in the form
  affectedAssets: string; // comma separated in the form
  measurements: string;   // "name=value" per line
}

export function emptyForm(): EventForm {
  return {
    id: "",
    category: "",
    subtype: "",
    status: "occurred",
    timestamp: "",
    title: "",
    narrative: "",
    tags: "",
    affectedAssets: "",
    measurements: "",
  };
}

export type FieldErrors = Map<string, string>;

export function validateForm(form: EventForm): FieldErrors {
  const errors: FieldErrors = new Map();
  if (!form.id.trim()) errors.set("id", "is required");
  if (!form.category) {
    errors.set("category", "is required");
  } else if (!(form.category in CATEGORY_SUBTYPES)) {
    errors.set("category", `unknown category ${form.category}`);
  }
  if (!form.subtype) {
    errors.set("subtype", "is required");
  } else if (
    form.category in CATEGORY_SUBTYPES &&
    !CATEGORY_SUBTYPES[form.category].includes(form.subtype)
  ) {
    errors.set("subtype", `${form.subtype} is not valid for ${form.category}`);
  }
  if (!EVENT_STATUSES.includes(form.status)) {
    errors.set("status", `must be one of ${EVENT_STATUSES.join(", ")}`);
  }
  for (const line of form.measurements.split("\n")) {
    const trimmed = line.trim();
    if (!trimmed) continue;
    const eq = trimmed.indexOf("=");
    if (eq <= 0 || Number.isNaN(Number(trimmed.slice(eq + 1)))) {
      errors.set("measurements", `bad measurement line: ${trimmed}`);
      break;
    }
  }
  return errors;
}

function splitList(text: string): string[] {
  return text
    .split(",")
    .map((part) => part.trim())
    .filter((part) => part.length > 0);
}

/** The JSON document POSTed to /v1/sessions. */
export function eventDocument(form: EventForm): Record<string, unknown> {
  const measurements: Record<string, number> = {};
  for (const line of form.measurements.split("\n")) {
    const trimmed = line.trim();
    if (!trimmed) continue;
    const eq = trimmed.indexOf("=");
    measurements[trimmed.slice(0, eq).trim()] = Number(trimmed.slice(eq + 1));
  }
  return {
    id: form.id.trim(),
    category: form.category,
    subtype: form.subtype,
    status: form.status,
    timestamp: form.timestamp,
    title: form.title,
    narrative: form.narrative,
    tags: splitList(form.tags),
    affected_assets: splitList(form.affectedAssets),
    measurements,
  };
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fieldError(errors: FieldErrors, name: string): string {
  const message = errors.get(name);
  return message ? `<span class="field-error" data-field="${name}">${escapeHtml(message)}</span>` : "";
}

export function renderIntakeForm(form: EventForm, errors: FieldErrors): string {
  const categories = Object.keys(CATEGORY_SUBTYPES).sort();
  const subtypes = form.category in CATEGORY_SUBTYPES ? CATEGORY_SUBTYPES[form.category] : [];
  const options = (items: string[], selected: string) =>
    items
      .map(
        (item) =>
          `<option value="${escapeHtml(item)}"${item === selected ? " selected" : ""}>${escapeHtml(item)}</option>`,
      )
      .join("");
  return `<form id="intake" class="intake">
  <label>event id <input name="id" value="${escapeHtml(form.id)}" required>${fieldError(errors, "id")}</label>
  <label>category <select name="category"><option value=""></option>${options(categories, form.category)}</select>${fieldError(errors, "category")}</label>
  <label>subtype <select name="subtype"><option value=""></option>${options([...subtypes], form.subtype)}</select>${fieldError(errors, "subtype")}</label>
  <label>status <select name="status">${options([...EVENT_STATUSES], form.status)}</select>${fieldError(errors, "status")}</label>
  <label>timestamp <input name="timestamp" value="${escapeHtml(form.timestamp)}"></label>
  <label>title <input name="title" value="${escapeHtml(form.title)}"></label>
  <label>narrative <textarea name="narrative">${escapeHtml(form.narrative)}</textarea></label>
  <label>tags (comma separated) <input name="tags" value="${escapeHtml(form.tags)}"></label>
  <label>affected assets <input name="affectedAssets" value="${escapeHtml(form.affectedAssets)}"></label>
  <label>measurements (name=value per line) <textarea name="measurements">${escapeHtml(form.measurements)}</textarea></label>
  <button type="submit">start session</button>
</form>`;
}
