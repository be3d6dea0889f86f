/** The four-step basic-indicator wizard: dataset, filters, analysis,
 * visualization. Steps unlock strictly in order; every panel revalidates
 * on change and the preview/save controls only arm once the whole draft
 * passes the same checks the engine applies server-side. */

import type { AppContext } from "../app.js";
import { badge, clear, el, option } from "../dom.js";
import {
  BASE_COLUMNS,
  type ChartRoleDoc,
  type ColumnDoc,
  type MethodDescriptorDoc,
} from "../types.js";
import { suggestMappings } from "../validation.js";
import { draftToSpec, markDirty, stepStatuses, previewEnabled, STEP_ORDER } from "../state.js";
import { renderInputMappingEditor, renderRoleMappingEditor, type Examples } from "./mappingEditors.js";
import { PreviewPane } from "./preview.js";

const DIMENSIONS: Array<{ key: keyof ScopeKey; label: string; dimension: string }> = [
  { key: "sources", label: "Data sources", dimension: "source" },
  { key: "platforms", label: "Platforms", dimension: "platform" },
  { key: "actions", label: "Actions", dimension: "action" },
  { key: "categories", label: "Categories", dimension: "category" },
];

interface ScopeKey {
  sources: string[];
  platforms: string[];
  actions: string[];
  categories: string[];
}

const PRIVACY_MODES = [
  ["everyone_anonymized", "anonymized data of everyone"],
  ["own_data_only", "own data only"],
  ["everyone_except_own_anonymized", "anonymized data of everyone except own"],
] as const;

export class BasicWizard {
  readonly root: HTMLElement;
  private panels: Record<string, HTMLFieldSetElement> = {};
  private badges: Record<string, HTMLElement> = {};
  private dimensionValues = new Map<string, string[]>();
  private schema: ColumnDoc[] = [...BASE_COLUMNS];
  private commonAttrs: ColumnDoc[] = [];
  private examples: Examples = new Map();
  private preview: PreviewPane;
  private nameInput: HTMLInputElement;
  private previewButton: HTMLButtonElement;
  private saveButton: HTMLButtonElement;
  private filterAttrSelect: HTMLSelectElement | null = null;

  constructor(private ctx: AppContext) {
    this.preview = new PreviewPane(ctx.client, "basic-preview");
    this.nameInput = el("input", {
      type: "text", placeholder: "indicator name", "data-test": "basic-name",
    });
    this.previewButton = el("button", { type: "button", "data-test": "basic-preview-btn" }, ["Preview"]);
    this.saveButton = el("button", { type: "button", "data-test": "basic-save-btn" }, ["Save & associate"]);
    this.root = el("div", { class: "basic-wizard" });
  }

  async mount(): Promise<void> {
    for (const { dimension } of DIMENSIONS) {
      const { values } = await this.ctx.client.dimensionValues(dimension);
      this.dimensionValues.set(dimension, values);
    }
    clear(this.root);
    for (const step of STEP_ORDER) {
      const fieldset = el("fieldset", { class: `step step-${step}`, "data-test": `step-${step}` });
      const marker = badge("", "pending");
      this.badges[step] = marker;
      fieldset.append(el("legend", {}, [step, " ", marker]));
      fieldset.append(el("div", { class: "step-body" }));
      this.panels[step] = fieldset;
      this.root.append(fieldset);
    }
    this.previewButton.addEventListener("click", () => void this.runPreview());
    this.saveButton.addEventListener("click", () => void this.save());
    this.root.append(
      el("div", { class: "wizard-footer" }, [this.nameInput, this.previewButton, this.saveButton]),
      this.preview.root,
    );
    this.renderDataset();
    this.renderFilters();
    this.renderAnalysis();
    this.renderVisualization();
    this.refreshGating();
  }

  private body(step: string): HTMLElement {
    return this.panels[step].querySelector(".step-body") as HTMLElement;
  }

  private descriptor(): MethodDescriptorDoc | null {
    return this.ctx.methods.find((m) => m.id === this.ctx.session.draft.methodId) ?? null;
  }

  private roles(): ChartRoleDoc[] | null {
    const chart = this.ctx.session.draft.chart;
    if (!chart) return null;
    const library = this.ctx.libraries.find((l) => l.library_id === chart.library_id);
    const entry = library?.charts.find((c) => c.chart_type === chart.chart_type);
    return entry?.roles ?? null;
  }

  refreshGating(): void {
    const { draft } = this.ctx.session;
    const statuses = stepStatuses(draft, this.descriptor(), this.schema, this.roles());
    for (const step of STEP_ORDER) {
      const status = statuses[step];
      this.panels[step].disabled = !status.unlocked;
      this.panels[step].classList.toggle("locked", !status.unlocked);
      const marker = this.badges[step];
      marker.textContent = status.valid ? "✓" : "•";
      marker.className = `badge badge-${status.valid ? "ok" : "pending"}`;
    }
    const armed = previewEnabled(statuses);
    this.previewButton.disabled = !armed;
    this.saveButton.disabled = !(armed && this.nameInput.value.trim().length > 0);
  }

  // -- dataset ------------------------------------------------------------

  private renderDataset(): void {
    const container = this.body("dataset");
    clear(container);
    const { scope } = this.ctx.session.draft;
    for (const { key, label, dimension } of DIMENSIONS) {
      const values = this.dimensionValues.get(dimension) ?? [];
      const group = el("div", { class: "dimension", "data-test": `dimension-${dimension}` }, [
        el("h4", {}, [label]),
      ]);
      for (const value of values) {
        const input = el("input", {
          type: "checkbox", "data-test": `pick-${dimension}-${value}`,
        });
        input.checked = scope[key].includes(value);
        input.addEventListener("change", () => {
          scope[key] = input.checked
            ? [...scope[key], value]
            : scope[key].filter((v) => v !== value);
          markDirty(this.ctx.session, "dataset");
          void this.onScopeChanged();
        });
        group.append(el("label", { class: "pick" }, [input, value]));
      }
      container.append(group);
    }
    container.append(el("p", { class: "hint" }, [
      "pick at least one category; other dimensions default to everything",
    ]));
  }

  private async onScopeChanged(): Promise<void> {
    const categories = this.ctx.session.draft.scope.categories;
    if (categories.length) {
      const { attributes } = await this.ctx.client.commonAttributes(categories);
      this.commonAttrs = attributes;
    } else {
      this.commonAttrs = [];
    }
    this.schema = [...BASE_COLUMNS, ...this.commonAttrs];
    await this.loadExamples();
    this.renderFilters();
    this.renderAnalysis();
    this.refreshGating();
  }

  /** Example values shown next to columns, e.g. Source (Text) {Moodle, edX}. */
  private async loadExamples(): Promise<void> {
    this.examples = new Map();
    this.examples.set("Source", this.dimensionValues.get("source") ?? []);
    this.examples.set("Platform", this.dimensionValues.get("platform") ?? []);
    this.examples.set("Action", this.dimensionValues.get("action") ?? []);
    this.examples.set("Category", this.ctx.session.draft.scope.categories);
    for (const attr of this.commonAttrs) {
      try {
        const { values } = await this.ctx.client.attributeValues(
          this.ctx.session.draft.scope, attr.name, "");
        this.examples.set(attr.name, values.slice(0, 2));
      } catch {
        // examples are decoration; ignore lookup failures
      }
    }
  }

  // -- filters --------------------------------------------------------------

  private renderFilters(): void {
    const container = this.body("filters");
    clear(container);
    const { filters } = this.ctx.session.draft;

    const applied = el("ul", { class: "applied-filters", "data-test": "applied-filters" });
    filters.attribute_filters.forEach((filter, index) => {
      const remove = el("button", { type: "button", class: "remove" }, ["remove"]);
      remove.addEventListener("click", () => {
        filters.attribute_filters.splice(index, 1);
        markDirty(this.ctx.session, "filters");
        this.renderFilters();
        this.refreshGating();
      });
      applied.append(el("li", {}, [
        `${filter.attribute} ∈ {${filter.values.join(", ")}} `, remove,
      ]));
    });

    const attrSelect = el("select", { "data-test": "filter-attribute" });
    attrSelect.append(option("", "attribute"));
    for (const attr of this.commonAttrs) attrSelect.append(option(attr.name));
    this.filterAttrSelect = attrSelect;

    const valueInput = el("input", {
      type: "text", placeholder: "search values", "data-test": "filter-value",
      list: "filter-value-options",
    });
    const datalist = el("datalist", { id: "filter-value-options" });
    valueInput.addEventListener("input", () => void this.searchValues(attrSelect.value, valueInput.value, datalist));
    attrSelect.addEventListener("change", () => void this.searchValues(attrSelect.value, "", datalist));

    const addFilter = el("button", { type: "button", "data-test": "filter-add" }, ["Add filter"]);
    addFilter.addEventListener("click", () => {
      if (!attrSelect.value || !valueInput.value) return;
      const attrType = this.commonAttrs.find((a) => a.name === attrSelect.value)?.type;
      const value = attrType === "Numeric" ? Number(valueInput.value) : valueInput.value;
      const existing = filters.attribute_filters.find((f) => f.attribute === attrSelect.value);
      if (existing) existing.values.push(value);
      else filters.attribute_filters.push({ attribute: attrSelect.value, values: [value] });
      valueInput.value = "";
      markDirty(this.ctx.session, "filters");
      this.renderFilters();
      this.refreshGating();
    });

    const timeStart = el("input", {
      type: "text", placeholder: "start, e.g. 2019-01-07T00:00:00Z", "data-test": "time-start",
    });
    timeStart.value = filters.time_start ?? "";
    const timeEnd = el("input", {
      type: "text", placeholder: "end (exclusive)", "data-test": "time-end",
    });
    timeEnd.value = filters.time_end ?? "";
    const onTime = () => {
      filters.time_start = timeStart.value.trim() || null;
      filters.time_end = timeEnd.value.trim() || null;
      markDirty(this.ctx.session, "filters");
      this.refreshGating();
    };
    timeStart.addEventListener("change", onTime);
    timeEnd.addEventListener("change", onTime);

    const privacy = el("div", { class: "privacy", "data-test": "privacy-modes" });
    for (const [mode, label] of PRIVACY_MODES) {
      const input = el("input", { type: "radio", name: "privacy", "data-test": `privacy-${mode}` });
      input.checked = filters.privacy_mode === mode;
      input.addEventListener("change", () => {
        filters.privacy_mode = mode;
        markDirty(this.ctx.session, "filters");
        this.refreshGating();
      });
      privacy.append(el("label", { class: "pick" }, [input, label]));
    }

    container.append(
      el("h4", {}, ["Attribute"]),
      applied,
      el("div", { class: "filter-picker" }, [attrSelect, valueInput, datalist, addFilter]),
      el("h4", {}, ["Time"]),
      el("div", {}, [timeStart, timeEnd]),
      el("h4", {}, ["User"]),
      privacy,
    );
  }

  private async searchValues(attribute: string, prefix: string, datalist: HTMLElement): Promise<void> {
    clear(datalist);
    if (!attribute) return;
    try {
      const { values } = await this.ctx.client.attributeValues(
        this.ctx.session.draft.scope, attribute, prefix);
      for (const value of values.slice(0, 20)) datalist.append(option(String(value)));
    } catch {
      // no values yet (e.g. attribute not common after a scope edit)
    }
  }

  // -- analysis ----------------------------------------------------------------

  private renderAnalysis(): void {
    const container = this.body("analysis");
    clear(container);
    const draft = this.ctx.session.draft;

    const methodSelect = el("select", { "data-test": "method-select" });
    methodSelect.append(option("", "select analytics method"));
    for (const method of this.ctx.methods) methodSelect.append(option(method.id, method.name));
    methodSelect.value = draft.methodId ?? "";
    methodSelect.addEventListener("change", () => {
      draft.methodId = methodSelect.value || null;
      draft.parameters = {};
      const descriptor = this.descriptor();
      // auto-mapping on entry; the user can always rebind
      draft.mappings = descriptor ? suggestMappings(descriptor, this.schema) : {};
      markDirty(this.ctx.session, "analysis");
      this.renderAnalysis();
      this.refreshGating();
    });
    container.append(el("div", {}, [methodSelect]));

    const descriptor = this.descriptor();
    if (!descriptor) return;

    const params = el("div", { class: "parameters" });
    for (const parameter of descriptor.parameters) {
      const input = el("input", {
        type: parameter.type === "Numeric" ? "number" : "text",
        value: String(draft.parameters[parameter.name] ?? parameter.default),
        "data-test": `param-${parameter.name}`,
      });
      input.addEventListener("change", () => {
        draft.parameters[parameter.name] =
          parameter.type === "Numeric" ? Number(input.value) : input.value;
        markDirty(this.ctx.session, "analysis");
        this.refreshGating();
      });
      params.append(el("label", { class: "param" }, [`${parameter.name} `, input]));
    }
    if (descriptor.parameters.length) {
      container.append(el("h4", {}, ["Parameters (defaults pre-selected)"]), params);
    }

    const mappingBox = el("div", { class: "mapping-box" });
    container.append(el("h4", {}, ["Mappings"]), mappingBox);
    renderInputMappingEditor({
      container: mappingBox,
      descriptor,
      schema: this.schema,
      bindings: draft.mappings,
      examples: this.examples,
      detailed: !this.ctx.session.beginnerMode,
      onChange: () => {
        markDirty(this.ctx.session, "analysis");
        this.renderAnalysis();
        this.refreshGating();
      },
    });
  }

  // -- visualization --------------------------------------------------------------

  private renderVisualization(): void {
    const container = this.body("visualization");
    clear(container);
    const draft = this.ctx.session.draft;

    const librarySelect = el("select", { "data-test": "library-select" });
    librarySelect.append(option("", "select library"));
    for (const library of this.ctx.libraries) {
      librarySelect.append(option(library.library_id, library.name));
    }
    const typeSelect = el("select", { "data-test": "chart-type-select" });

    const refreshTypes = () => {
      clear(typeSelect);
      typeSelect.append(option("", "select chart type"));
      const library = this.ctx.libraries.find((l) => l.library_id === librarySelect.value);
      for (const chart of library?.charts ?? []) {
        typeSelect.append(option(chart.chart_type));
      }
    };
    refreshTypes();
    if (draft.chart) {
      librarySelect.value = draft.chart.library_id;
      refreshTypes();
      typeSelect.value = draft.chart.chart_type;
    }

    const roleBox = el("div", { class: "role-box" });
    const refreshRoles = () => {
      clear(roleBox);
      const descriptor = this.descriptor();
      const roles = this.roles();
      if (!descriptor || !roles || !draft.chart) return;
      renderRoleMappingEditor({
        container: roleBox,
        roles,
        schema: descriptor.outputs,
        bindings: draft.chart.viz_mappings,
        detailed: !this.ctx.session.beginnerMode,
        onChange: () => {
          markDirty(this.ctx.session, "visualization");
          this.refreshGating();
        },
      });
    };

    const onChoice = () => {
      if (librarySelect.value && typeSelect.value) {
        const keep = draft.chart?.viz_mappings ?? {};
        draft.chart = {
          library_id: librarySelect.value,
          chart_type: typeSelect.value,
          viz_mappings: { ...keep },
        };
      } else {
        draft.chart = null;
      }
      markDirty(this.ctx.session, "visualization");
      refreshRoles();
      this.refreshGating();
    };
    librarySelect.addEventListener("change", () => {
      refreshTypes();
      onChoice();
    });
    typeSelect.addEventListener("change", onChoice);

    container.append(el("div", {}, [librarySelect, typeSelect]), roleBox);
    refreshRoles();
  }

  // -- preview and save ---------------------------------------------------------------

  private async runPreview(): Promise<void> {
    const draft = this.ctx.session.draft;
    draft.name = this.nameInput.value.trim() || draft.name;
    try {
      await this.preview.run("basic", draftToSpec(draft));
      this.ctx.session.previewFresh = true;
      this.ctx.setStatus("preview updated");
    } catch (error) {
      this.ctx.setStatus(String(error), true);
    }
    this.refreshGating();
  }

  private async save(): Promise<void> {
    const draft = this.ctx.session.draft;
    draft.name = this.nameInput.value.trim();
    try {
      const record = await this.ctx.client.saveIndicator("basic", draftToSpec(draft));
      if (this.ctx.session.questionId) {
        await this.ctx.client.associateIndicator(this.ctx.session.questionId, record.indicator_id);
      }
      this.ctx.setStatus(`saved ${record.indicator_id}`);
      await this.ctx.onCatalogChanged();
    } catch (error) {
      this.ctx.setStatus(String(error), true);
    }
  }
}
