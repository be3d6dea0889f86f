import { describe, expect, it } from "vitest";

import {
  emptyDraft,
  previewEnabled,
  stepStatuses,
  STEP_ORDER,
} from "../src/state.js";
import { BASE_COLUMNS, type ChartRoleDoc, type MethodDescriptorDoc } from "../src/types.js";

const countItems: MethodDescriptorDoc = {
  id: "count_items",
  name: "Count items",
  inputs: [{ name: "Items to count", type: "Text", required: true }],
  outputs: [
    { name: "Item", type: "Text" },
    { name: "Count", type: "Numeric" },
  ],
  parameters: [],
};

const barRoles: ChartRoleDoc[] = [
  { role: "x", type: "Text", required: true },
  { role: "y", type: "Numeric", required: true },
  { role: "series", type: "Text", required: false },
];

describe("wizard gating", () => {
  it("locks everything behind the dataset step", () => {
    const statuses = stepStatuses(emptyDraft(), null, BASE_COLUMNS, null);
    expect(statuses.dataset).toEqual({ unlocked: true, valid: false });
    expect(statuses.filters.unlocked).toBe(false);
    expect(statuses.analysis.unlocked).toBe(false);
    expect(statuses.visualization.unlocked).toBe(false);
  });

  it("unlocks in order as steps become valid", () => {
    const draft = emptyDraft();
    draft.scope.categories = ["Learning Materials"];
    let statuses = stepStatuses(draft, null, BASE_COLUMNS, null);
    expect(statuses.filters.unlocked).toBe(true);
    expect(statuses.analysis.unlocked).toBe(true); // default filters are valid
    expect(statuses.analysis.valid).toBe(false);

    draft.methodId = "count_items";
    draft.mappings = { "Items to count": "Action" };
    statuses = stepStatuses(draft, countItems, BASE_COLUMNS, null);
    expect(statuses.analysis.valid).toBe(true);
    expect(statuses.visualization.unlocked).toBe(true);
    expect(previewEnabled(statuses)).toBe(false);

    draft.chart = { library_id: "c3js", chart_type: "bar", viz_mappings: { x: "Item", y: "Count" } };
    statuses = stepStatuses(draft, countItems, BASE_COLUMNS, barRoles);
    expect(statuses.visualization.valid).toBe(true);
    expect(previewEnabled(statuses)).toBe(true);
  });

  it("an invalid earlier step relocks everything after it", () => {
    const draft = emptyDraft();
    draft.scope.categories = ["Learning Materials"];
    draft.methodId = "count_items";
    draft.mappings = { "Items to count": "Action" };
    draft.chart = { library_id: "c3js", chart_type: "bar", viz_mappings: { x: "Item", y: "Count" } };
    draft.filters.time_start = "2019-02-01T00:00:00Z";
    draft.filters.time_end = "2019-01-01T00:00:00Z"; // inverted window
    const statuses = stepStatuses(draft, countItems, BASE_COLUMNS, barRoles);
    expect(statuses.filters.valid).toBe(false);
    expect(statuses.analysis.unlocked).toBe(false);
    expect(previewEnabled(statuses)).toBe(false);
  });

  it("a type-broken mapping blocks the preview", () => {
    const draft = emptyDraft();
    draft.scope.categories = ["Learning Materials"];
    draft.methodId = "count_items";
    draft.mappings = { "Items to count": "Timestamp" };
    const statuses = stepStatuses(draft, countItems, BASE_COLUMNS, barRoles);
    expect(statuses.analysis.valid).toBe(false);
    expect(STEP_ORDER.indexOf("visualization")).toBeGreaterThan(STEP_ORDER.indexOf("analysis"));
    expect(statuses.visualization.unlocked).toBe(false);
  });
});
