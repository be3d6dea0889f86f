/** Reusable editors for the two mapping tasks: method inputs -> dataset
 * columns, and chart roles -> analyzed columns.
 *
 * Required inputs render red, optional ones green; a bound input leaves
 * the selectable list and shows up in the mapped list with a remove
 * control instead.
 */

import { clear, el, option } from "../dom.js";
import type { ChartRoleDoc, ColumnDoc, MethodDescriptorDoc } from "../types.js";

export type Examples = Map<string, Array<string | number>>;

function columnLabel(column: ColumnDoc, examples: Examples | null, detailed: boolean): string {
  if (!detailed) return column.name;
  const hint = examples?.get(column.name);
  const sample = hint && hint.length ? ` {${hint.slice(0, 2).join(", ")}}` : "";
  return `${column.name} (${column.type})${sample}`;
}

export interface MappingEditorOptions {
  container: HTMLElement;
  descriptor: MethodDescriptorDoc;
  schema: ColumnDoc[];
  bindings: Record<string, string>;
  examples: Examples | null;
  detailed: boolean;
  onChange: () => void;
}

export function renderInputMappingEditor(opts: MappingEditorOptions): void {
  const { container, descriptor, schema, bindings } = opts;
  clear(container);

  const unbound = descriptor.inputs.filter((input) => !(input.name in bindings));
  const inputSelect = el("select", { "data-test": "mapping-input" });
  inputSelect.append(option("", "select method input"));
  for (const input of unbound) {
    const cls = input.required ? "required-input" : "optional-input";
    const opt = option(input.name, opts.detailed ? `${input.name} (${input.type})` : input.name);
    opt.className = cls;
    inputSelect.append(opt);
  }

  const columnSelect = el("select", { "data-test": "mapping-column" });
  const refreshColumns = () => {
    clear(columnSelect);
    columnSelect.append(option("", "select dataset column"));
    const chosen = descriptor.inputs.find((i) => i.name === inputSelect.value);
    for (const column of schema) {
      if (chosen && column.type !== chosen.type) continue; // same-type columns only
      columnSelect.append(option(column.name, columnLabel(column, opts.examples, opts.detailed)));
    }
  };
  refreshColumns();
  inputSelect.addEventListener("change", refreshColumns);

  const addButton = el("button", { type: "button", "data-test": "mapping-add" }, ["Add"]);
  addButton.addEventListener("click", () => {
    if (!inputSelect.value || !columnSelect.value) return;
    bindings[inputSelect.value] = columnSelect.value;
    opts.onChange();
  });

  const picker = el("div", { class: "mapping-picker" }, [inputSelect, columnSelect, addButton]);

  const mapped = el("ul", { class: "mapped-list", "data-test": "mapped-list" });
  for (const input of descriptor.inputs) {
    const column = bindings[input.name];
    if (!column) continue;
    const remove = el("button", {
      type: "button",
      class: "remove",
      "data-test": `unmap-${input.name}`,
    }, ["remove"]);
    remove.addEventListener("click", () => {
      delete bindings[input.name];
      opts.onChange();
    });
    const cls = input.required ? "required-input" : "optional-input";
    mapped.append(el("li", { class: cls, "data-input": input.name }, [
      `${input.name} ← ${column} `,
      remove,
    ]));
  }

  const legend = opts.detailed
    ? el("p", { class: "hint" }, ["red = required input, green = optional"])
    : el("span", {}, []);
  container.append(picker, mapped, legend);
}

export interface RoleEditorOptions {
  container: HTMLElement;
  roles: ChartRoleDoc[];
  schema: ColumnDoc[];
  bindings: Record<string, string>;
  detailed: boolean;
  onChange: () => void;
}

export function renderRoleMappingEditor(opts: RoleEditorOptions): void {
  const { container, roles, schema, bindings } = opts;
  clear(container);
  for (const role of roles) {
    const select = el("select", { "data-test": `role-${role.role}` });
    select.append(option("", "(unbound)"));
    for (const column of schema) {
      if (column.type !== role.type) continue;
      select.append(option(column.name, opts.detailed ? `${column.name} (${column.type})` : column.name));
    }
    select.value = bindings[role.role] ?? "";
    select.addEventListener("change", () => {
      if (select.value) bindings[role.role] = select.value;
      else delete bindings[role.role];
      opts.onChange();
    });
    const cls = role.required ? "required-input" : "optional-input";
    const label = opts.detailed ? `${role.role} (${role.type})` : role.role;
    container.append(el("label", { class: `role-row ${cls}` }, [label + " ", select]));
  }
}
