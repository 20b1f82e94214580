import { describe, expect, it } from "vitest";

import { ApiError, fieldErrors } from "../src/api.js";
import { emptyForm, eventDocument, renderIntakeForm, validateForm } from "../src/intake.js";
import { CATEGORY_SUBTYPES } from "../src/types.js";
import { fixture } from "./helpers.js";

function validProductionForm() {
  return {
    ...emptyForm(),
    id: "ev-1",
    category: "production",
    subtype: "emergency",
    tags: "flooding, tank-fire",
    affectedAssets: "furnace1",
    measurements: "gas_concentration=6.2",
  };
}

describe("intake validation", () => {
  it("accepts a valid production event", () => {
    expect(validateForm(validProductionForm()).size).toBe(0);
  });

  it("rejects a missing subtype without touching the network", () => {
    const form = { ...validProductionForm(), subtype: "" };
    const errors = validateForm(form);
    expect(errors.get("subtype")).toMatch(/required/);
    const html = renderIntakeForm(form, errors);
    expect(html).toContain('data-field="subtype"');
  });

  it("mirrors the gateway category/subtype pairs", () => {
    for (const [category, subtypes] of Object.entries(CATEGORY_SUBTYPES)) {
      for (const subtype of subtypes) {
        const form = { ...validProductionForm(), category, subtype };
        expect(validateForm(form).has("subtype")).toBe(false);
      }
    }
    const crossed = { ...validProductionForm(), category: "market", subtype: "emergency" };
    expect(validateForm(crossed).get("subtype")).toMatch(/not valid/);
  });

  it("rejects malformed measurements", () => {
    const form = { ...validProductionForm(), measurements: "gas=high" };
    expect(validateForm(form).get("measurements")).toMatch(/bad measurement/);
  });

  it("builds the event document the gateway expects", () => {
    const doc = eventDocument(validProductionForm());
    expect(doc).toMatchObject({
      id: "ev-1",
      category: "production",
      subtype: "emergency",
      status: "occurred",
      tags: ["flooding", "tank-fire"],
      affected_assets: ["furnace1"],
      measurements: { gas_concentration: 6.2 },
    });
  });

  it("maps the gateway's 422 detail to field-inline errors", () => {
    const recorded = fixture<{ status: number; body: { detail: unknown } }>(
      "intake_validation_error.json",
    );
    expect(recorded.status).toBe(422);
    const error = new ApiError("rejected", recorded.status, recorded.body.detail, false);
    const fields = fieldErrors(error);
    expect(fields.get("category")).toBeTruthy();
    const html = renderIntakeForm(emptyForm(), fields);
    expect(html).toContain('data-field="category"');
  });
});
