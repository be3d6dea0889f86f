/** Client-side mirror of the engine's typed mapping rules.
 *
 * The wizard refuses to submit anything the engine would reject for type
 * reasons, so these checks must stay behaviorally identical to the server
 * side: required inputs bound, binding types equal, suggestion = exact
 * name+type match first, then unique unclaimed type match.
 */

import type {
  ChartRoleDoc,
  ColumnDoc,
  IssueDoc,
  MethodDescriptorDoc,
} from "./types.js";

export function validateMapping(
  descriptor: MethodDescriptorDoc,
  schema: ColumnDoc[],
  bindings: Record<string, string>,
): IssueDoc[] {
  const issues: IssueDoc[] = [];
  const columnTypes = new Map(schema.map((c) => [c.name, c.type]));
  const inputTypes = new Map(descriptor.inputs.map((i) => [i.name, i]));

  for (const [inputName, columnName] of Object.entries(bindings)) {
    const input = inputTypes.get(inputName);
    if (!input) {
      issues.push({ code: "UnknownInput", field: inputName, message: `method has no input '${inputName}'` });
      continue;
    }
    const columnType = columnTypes.get(columnName);
    if (columnType === undefined) {
      issues.push({ code: "UnknownColumn", field: inputName, message: `no column '${columnName}' in the dataset` });
    } else if (columnType !== input.type) {
      issues.push({
        code: "TypeMismatch",
        field: inputName,
        message: `input '${inputName}' (${input.type}) cannot take column '${columnName}' (${columnType})`,
      });
    }
  }
  for (const input of descriptor.inputs) {
    if (input.required && !(input.name in bindings)) {
      issues.push({
        code: "MissingRequiredInput",
        field: input.name,
        message: `required input '${input.name}' is not bound`,
      });
    }
  }
  return issues;
}

export function suggestMappings(
  descriptor: MethodDescriptorDoc,
  schema: ColumnDoc[],
): Record<string, string> {
  const columnTypes = new Map(schema.map((c) => [c.name, c.type]));
  const bindings: Record<string, string> = {};
  const claimed = new Set<string>();

  for (const input of descriptor.inputs) {
    if (columnTypes.get(input.name) === input.type && !claimed.has(input.name)) {
      bindings[input.name] = input.name;
      claimed.add(input.name);
    }
  }
  for (const input of descriptor.inputs) {
    if (input.name in bindings) continue;
    const candidates = schema.filter((c) => c.type === input.type && !claimed.has(c.name));
    if (candidates.length === 1) {
      bindings[input.name] = candidates[0].name;
      claimed.add(candidates[0].name);
    }
  }
  return bindings;
}

export function validateVizMapping(
  roles: ChartRoleDoc[],
  schema: ColumnDoc[],
  bindings: Record<string, string>,
): IssueDoc[] {
  const issues: IssueDoc[] = [];
  const columnTypes = new Map(schema.map((c) => [c.name, c.type]));
  const byRole = new Map(roles.map((r) => [r.role, r]));

  for (const [roleName, columnName] of Object.entries(bindings)) {
    const role = byRole.get(roleName);
    if (!role) {
      issues.push({ code: "UnknownInput", field: roleName, message: `chart has no role '${roleName}'` });
      continue;
    }
    const columnType = columnTypes.get(columnName);
    if (columnType === undefined) {
      issues.push({ code: "UnknownColumn", field: roleName, message: `no column '${columnName}'` });
    } else if (columnType !== role.type) {
      issues.push({
        code: "TypeMismatch",
        field: roleName,
        message: `role '${roleName}' (${role.type}) cannot take column '${columnName}' (${columnType})`,
      });
    }
  }
  for (const role of roles) {
    if (role.required && !(role.role in bindings)) {
      issues.push({
        code: "MissingRequiredInput",
        field: role.role,
        message: `required role '${role.role}' is not bound`,
      });
    }
  }
  return issues;
}

/** Partition candidates into combinable/not against the first selection
 * (same analytics method); the selection itself appears in neither list. */
export function checkComposable<T extends { indicator_id: string; methodId: string }>(
  first: T,
  candidates: T[],
): { compatible: T[]; incompatible: T[] } {
  const compatible: T[] = [];
  const incompatible: T[] = [];
  for (const candidate of candidates) {
    if (candidate.indicator_id === first.indicator_id) continue;
    (candidate.methodId === first.methodId ? compatible : incompatible).push(candidate);
  }
  return { compatible, incompatible };
}

/** Output columns sharing name+type across every part: legal merge keys. */
export function commonMergeAttributes(outputs: ColumnDoc[][]): ColumnDoc[] {
  if (!outputs.length) return [];
  let common = outputs[0];
  for (const schema of outputs.slice(1)) {
    const types = new Map(schema.map((c) => [c.name, c.type]));
    common = common.filter((c) => types.get(c.name) === c.type);
  }
  return common;
}

/** Schema of the first-level join: merge key plus "<part>: <column>". */
export function joinedSchema(
  parts: Array<{ name: string; outputs: ColumnDoc[] }>,
  mergeAttribute: string,
): ColumnDoc[] | null {
  let keyType: ColumnDoc["type"] | null = null;
  for (const part of parts) {
    const key = part.outputs.find((c) => c.name === mergeAttribute);
    if (!key || (keyType !== null && key.type !== keyType)) return null;
    keyType = key.type;
  }
  if (keyType === null) return null;
  const columns: ColumnDoc[] = [{ name: mergeAttribute, type: keyType }];
  for (const part of parts) {
    for (const column of part.outputs) {
      if (column.name !== mergeAttribute) {
        columns.push({ name: `${part.name}: ${column.name}`, type: column.type });
      }
    }
  }
  return columns;
}
