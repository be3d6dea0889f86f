/** Composite and multi-level panels: combine saved basic indicators.
 *
 * Composite selection follows the same-method rule: after the first pick,
 * combinable indicators highlight green and the rest disable. Multi-level
 * selection is method-agnostic but requires a merge column common to all
 * chosen parts' outputs.
 */

import type { AppContext } from "../app.js";
import { clear, el, option } from "../dom.js";
import type { ColumnDoc, IndicatorRecordDoc } from "../types.js";
import { checkComposable, commonMergeAttributes, joinedSchema, suggestMappings } from "../validation.js";
import { renderInputMappingEditor, renderRoleMappingEditor } from "./mappingEditors.js";
import { PreviewPane } from "./preview.js";

interface BasicPart {
  indicator_id: string;
  name: string;
  methodId: string;
}

function asPart(record: IndicatorRecordDoc): BasicPart {
  const spec = record.spec as { name?: string; method_id?: string };
  return {
    indicator_id: record.indicator_id,
    name: spec.name ?? record.indicator_id,
    methodId: spec.method_id ?? "",
  };
}

function chartChoiceControls(
  ctx: AppContext,
  onChange: () => void,
): { container: HTMLElement; value: () => { library_id: string; chart_type: string } | null } {
  const librarySelect = el("select", { "data-test": "compose-library" });
  librarySelect.append(option("", "library"));
  for (const library of ctx.libraries) librarySelect.append(option(library.library_id, library.name));
  const typeSelect = el("select", { "data-test": "compose-chart-type" });
  const refresh = () => {
    clear(typeSelect);
    typeSelect.append(option("", "chart type"));
    const library = ctx.libraries.find((l) => l.library_id === librarySelect.value);
    for (const chart of library?.charts ?? []) typeSelect.append(option(chart.chart_type));
  };
  refresh();
  librarySelect.addEventListener("change", () => {
    refresh();
    onChange();
  });
  typeSelect.addEventListener("change", onChange);
  return {
    container: el("div", {}, [librarySelect, typeSelect]),
    value: () =>
      librarySelect.value && typeSelect.value
        ? { library_id: librarySelect.value, chart_type: typeSelect.value }
        : null,
  };
}


export class CompositePanel {
  readonly root: HTMLElement;
  private parts: BasicPart[] = [];
  private selected: string[] = [];
  private vizMappings: Record<string, string> = {};
  private preview: PreviewPane;
  private list: HTMLElement;
  private roleBox: HTMLElement;
  private nameInput: HTMLInputElement;
  private chart: ReturnType<typeof chartChoiceControls>;
  private previewButton: HTMLButtonElement;
  private saveButton: HTMLButtonElement;

  constructor(private ctx: AppContext) {
    this.preview = new PreviewPane(ctx.client, "composite-preview");
    this.list = el("div", { class: "part-list", "data-test": "composite-parts" });
    this.roleBox = el("div", { class: "role-box" });
    this.nameInput = el("input", { type: "text", placeholder: "composite name", "data-test": "composite-name" });
    this.chart = chartChoiceControls(ctx, () => this.renderRoles());
    this.previewButton = el("button", { type: "button", "data-test": "composite-preview-btn" }, ["Preview"]);
    this.saveButton = el("button", { type: "button", "data-test": "composite-save-btn" }, ["Save & associate"]);
    this.previewButton.addEventListener("click", () => void this.runPreview());
    this.saveButton.addEventListener("click", () => void this.save());
    this.root = el("div", { class: "composite-panel" }, [
      el("p", { class: "hint" }, [
        "combine two or more basic indicators that apply the same analytics method",
      ]),
      this.list,
      this.nameInput,
      this.chart.container,
      this.roleBox,
      el("div", {}, [this.previewButton, this.saveButton]),
      this.preview.root,
    ]);
  }

  async refresh(): Promise<void> {
    const { indicators } = await this.ctx.client.indicators();
    this.parts = indicators.filter((r) => r.kind === "basic").map(asPart);
    this.selected = this.selected.filter((id) => this.parts.some((p) => p.indicator_id === id));
    this.renderList();
    this.renderRoles();
  }

  private renderList(): void {
    clear(this.list);
    const first = this.parts.find((p) => p.indicator_id === this.selected[0]);
    const gating = first ? checkComposable(first, this.parts) : null;
    for (const part of this.parts) {
      const isSelected = this.selected.includes(part.indicator_id);
      let cls = "part";
      let disabled = false;
      if (gating && !isSelected) {
        if (gating.compatible.some((p) => p.indicator_id === part.indicator_id)) {
          cls += " compatible";
        } else {
          cls += " disabled";
          disabled = true;
        }
      }
      if (isSelected) cls += " selected";
      const button = el("button", {
        type: "button",
        class: cls,
        "data-test": `composite-part-${part.indicator_id}`,
      }, [`${part.name} (${part.methodId})`]);
      button.disabled = disabled;
      button.addEventListener("click", () => {
        this.selected = isSelected
          ? this.selected.filter((id) => id !== part.indicator_id)
          : [...this.selected, part.indicator_id];
        this.renderList();
        this.renderRoles();
      });
      this.list.append(button);
    }
    this.previewButton.disabled = this.selected.length < 2;
    this.saveButton.disabled = this.selected.length < 2;
  }

  /** Output schema of the shared method plus the part-name tag column. */
  private combinedSchema(): ColumnDoc[] | null {
    const first = this.parts.find((p) => p.indicator_id === this.selected[0]);
    if (!first) return null;
    const descriptor = this.ctx.methods.find((m) => m.id === first.methodId);
    if (!descriptor) return null;
    return [{ name: "Indicator", type: "Text" }, ...descriptor.outputs];
  }

  private renderRoles(): void {
    clear(this.roleBox);
    const choice = this.chart.value();
    const schema = this.combinedSchema();
    if (!choice || !schema) return;
    const library = this.ctx.libraries.find((l) => l.library_id === choice.library_id);
    const roles = library?.charts.find((c) => c.chart_type === choice.chart_type)?.roles;
    if (!roles) return;
    renderRoleMappingEditor({
      container: this.roleBox,
      roles,
      schema,
      bindings: this.vizMappings,
      detailed: !this.ctx.session.beginnerMode,
      onChange: () => undefined,
    });
  }

  private specDoc() {
    const choice = this.chart.value();
    return {
      name: this.nameInput.value.trim() || "composite",
      parts: [...this.selected],
      chart: choice ? { ...choice, viz_mappings: this.vizMappings } : null,
    };
  }

  private async runPreview(): Promise<void> {
    try {
      await this.preview.run("composite", this.specDoc());
      this.ctx.setStatus("composite preview updated");
    } catch (error) {
      this.ctx.setStatus(String(error), true);
    }
  }

  private async save(): Promise<void> {
    try {
      const record = await this.ctx.client.saveIndicator("composite", this.specDoc());
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


export class MultiLevelPanel {
  readonly root: HTMLElement;
  private parts: BasicPart[] = [];
  private selected: string[] = [];
  private mergeSelect: HTMLSelectElement;
  private methodSelect: HTMLSelectElement;
  private mappingBox: HTMLElement;
  private roleBox: HTMLElement;
  private list: HTMLElement;
  private nameInput: HTMLInputElement;
  private chart: ReturnType<typeof chartChoiceControls>;
  private secondMappings: Record<string, string> = {};
  private vizMappings: Record<string, string> = {};
  private parameters: Record<string, number | string> = {};
  private paramsBox: HTMLElement;
  private preview: PreviewPane;
  private previewButton: HTMLButtonElement;
  private saveButton: HTMLButtonElement;

  constructor(private ctx: AppContext) {
    this.preview = new PreviewPane(ctx.client, "multilevel-preview");
    this.list = el("div", { class: "part-list", "data-test": "multilevel-parts" });
    this.mergeSelect = el("select", { "data-test": "merge-attribute" });
    this.methodSelect = el("select", { "data-test": "second-method" });
    this.mappingBox = el("div", { class: "mapping-box" });
    this.roleBox = el("div", { class: "role-box" });
    this.paramsBox = el("div", { class: "parameters" });
    this.nameInput = el("input", { type: "text", placeholder: "multi-level name", "data-test": "multilevel-name" });
    this.chart = chartChoiceControls(ctx, () => this.renderRoles());
    this.previewButton = el("button", { type: "button", "data-test": "multilevel-preview-btn" }, ["Preview"]);
    this.saveButton = el("button", { type: "button", "data-test": "multilevel-save-btn" }, ["Save & associate"]);
    this.previewButton.addEventListener("click", () => void this.runPreview());
    this.saveButton.addEventListener("click", () => void this.save());

    this.methodSelect.append(option("", "second-level method"));
    for (const method of ctx.methods) this.methodSelect.append(option(method.id, method.name));
    this.mergeSelect.addEventListener("change", () => this.renderSecondMapping());
    this.methodSelect.addEventListener("change", () => {
      this.parameters = {};
      this.secondMappings = {};
      const descriptor = ctx.methods.find((m) => m.id === this.methodSelect.value);
      const schema = this.joined();
      if (descriptor && schema) this.secondMappings = suggestMappings(descriptor, schema);
      this.renderSecondMapping();
    });

    this.root = el("div", { class: "multilevel-panel" }, [
      el("p", { class: "hint" }, [
        "first-level: pick two or more basic indicators; their results merge on a common output column",
      ]),
      this.list,
      el("label", {}, ["merge on ", this.mergeSelect]),
      el("h4", {}, ["Second-level analysis"]),
      this.methodSelect,
      this.paramsBox,
      this.mappingBox,
      this.nameInput,
      this.chart.container,
      this.roleBox,
      el("div", {}, [this.previewButton, this.saveButton]),
      this.preview.root,
    ]);
  }

  async refresh(): Promise<void> {
    const { indicators } = await this.ctx.client.indicators();
    this.parts = indicators.filter((r) => r.kind === "basic").map(asPart);
    this.selected = this.selected.filter((id) => this.parts.some((p) => p.indicator_id === id));
    this.renderList();
    this.renderMergeChoices();
  }

  private renderList(): void {
    clear(this.list);
    for (const part of this.parts) {
      const isSelected = this.selected.includes(part.indicator_id);
      const button = el("button", {
        type: "button",
        class: isSelected ? "part selected" : "part",
        "data-test": `multilevel-part-${part.indicator_id}`,
      }, [`${part.name} (${part.methodId})`]);
      button.addEventListener("click", () => {
        this.selected = isSelected
          ? this.selected.filter((id) => id !== part.indicator_id)
          : [...this.selected, part.indicator_id];
        this.renderList();
        this.renderMergeChoices();
      });
      this.list.append(button);
    }
    const enough = this.selected.length >= 2;
    this.previewButton.disabled = !enough;
    this.saveButton.disabled = !enough;
  }

  private selectedParts(): Array<{ name: string; outputs: ColumnDoc[] }> {
    const chosen: Array<{ name: string; outputs: ColumnDoc[] }> = [];
    for (const id of this.selected) {
      const part = this.parts.find((p) => p.indicator_id === id);
      const descriptor = part && this.ctx.methods.find((m) => m.id === part.methodId);
      if (part && descriptor) chosen.push({ name: part.name, outputs: descriptor.outputs });
    }
    return chosen;
  }

  private renderMergeChoices(): void {
    const previous = this.mergeSelect.value;
    clear(this.mergeSelect);
    this.mergeSelect.append(option("", "merge attribute"));
    const common = commonMergeAttributes(this.selectedParts().map((p) => p.outputs));
    for (const column of common) {
      this.mergeSelect.append(option(column.name, `${column.name} (${column.type})`));
    }
    if (common.some((c) => c.name === previous)) this.mergeSelect.value = previous;
    this.renderSecondMapping();
  }

  private joined(): ColumnDoc[] | null {
    if (!this.mergeSelect.value || this.selected.length < 2) return null;
    return joinedSchema(this.selectedParts(), this.mergeSelect.value);
  }

  private renderSecondMapping(): void {
    clear(this.mappingBox);
    clear(this.paramsBox);
    const descriptor = this.ctx.methods.find((m) => m.id === this.methodSelect.value);
    const schema = this.joined();
    if (!descriptor || !schema) return;
    for (const parameter of descriptor.parameters) {
      const input = el("input", {
        type: parameter.type === "Numeric" ? "number" : "text",
        value: String(this.parameters[parameter.name] ?? parameter.default),
        "data-test": `second-param-${parameter.name}`,
      });
      input.addEventListener("change", () => {
        this.parameters[parameter.name] =
          parameter.type === "Numeric" ? Number(input.value) : input.value;
      });
      this.paramsBox.append(el("label", { class: "param" }, [`${parameter.name} `, input]));
    }
    renderInputMappingEditor({
      container: this.mappingBox,
      descriptor,
      schema,
      bindings: this.secondMappings,
      examples: null,
      detailed: !this.ctx.session.beginnerMode,
      onChange: () => this.renderSecondMapping(),
    });
    this.renderRoles();
  }

  private renderRoles(): void {
    clear(this.roleBox);
    const choice = this.chart.value();
    const descriptor = this.ctx.methods.find((m) => m.id === this.methodSelect.value);
    if (!choice || !descriptor) return;
    const library = this.ctx.libraries.find((l) => l.library_id === choice.library_id);
    const roles = library?.charts.find((c) => c.chart_type === choice.chart_type)?.roles;
    if (!roles) return;
    renderRoleMappingEditor({
      container: this.roleBox,
      roles,
      schema: descriptor.outputs,
      bindings: this.vizMappings,
      detailed: !this.ctx.session.beginnerMode,
      onChange: () => undefined,
    });
  }

  private specDoc() {
    const choice = this.chart.value();
    return {
      name: this.nameInput.value.trim() || "multi-level",
      parts: [...this.selected],
      merge_attribute: this.mergeSelect.value,
      second_method_id: this.methodSelect.value,
      second_parameters: this.parameters,
      second_mappings: this.secondMappings,
      chart: choice ? { ...choice, viz_mappings: this.vizMappings } : null,
    };
  }

  private async runPreview(): Promise<void> {
    try {
      await this.preview.run("multilevel", this.specDoc());
      this.ctx.setStatus("multi-level preview updated");
    } catch (error) {
      this.ctx.setStatus(String(error), true);
    }
  }

  private async save(): Promise<void> {
    try {
      const record = await this.ctx.client.saveIndicator("multilevel", this.specDoc());
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
