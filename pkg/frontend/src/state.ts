/** Editor session state: wizard gating, drafts, preview freshness.
 *
 * The basic-indicator wizard unlocks strictly in order
 * dataset -> filters -> analysis -> visualization, and preview/save only
 * become available once every validation passes. Pure data + functions so
 * the rules are testable without a DOM.
 */

import type {
  BasicSpecDoc,
  ChartChoiceDoc,
  ChartRoleDoc,
  ColumnDoc,
  FiltersDoc,
  MethodDescriptorDoc,
  ScopeDoc,
} from "./types.js";
import { validateMapping, validateVizMapping } from "./validation.js";

export const STEP_ORDER = ["dataset", "filters", "analysis", "visualization"] as const;
export type WizardStep = (typeof STEP_ORDER)[number];

export interface BasicDraft {
  name: string;
  scope: ScopeDoc;
  filters: FiltersDoc;
  methodId: string | null;
  parameters: Record<string, number | string>;
  mappings: Record<string, string>;
  chart: ChartChoiceDoc | null;
}

export function emptyDraft(): BasicDraft {
  return {
    name: "",
    scope: { sources: [], platforms: [], actions: [], categories: [] },
    filters: {
      attribute_filters: [],
      time_start: null,
      time_end: null,
      privacy_mode: "everyone_anonymized",
    },
    methodId: null,
    parameters: {},
    mappings: {},
    chart: null,
  };
}

export function datasetValid(draft: BasicDraft): boolean {
  return draft.scope.categories.length > 0;
}

export function filtersValid(draft: BasicDraft): boolean {
  const { time_start, time_end } = draft.filters;
  if (time_start && time_end && time_start > time_end) return false;
  return draft.filters.attribute_filters.every((f) => f.values.length > 0);
}

export function analysisValid(
  draft: BasicDraft,
  descriptor: MethodDescriptorDoc | null,
  schema: ColumnDoc[],
): boolean {
  if (!draft.methodId || !descriptor) return false;
  return validateMapping(descriptor, schema, draft.mappings).length === 0;
}

export function visualizationValid(
  draft: BasicDraft,
  descriptor: MethodDescriptorDoc | null,
  roles: ChartRoleDoc[] | null,
): boolean {
  if (!draft.chart || !descriptor || !roles) return false;
  return validateVizMapping(roles, descriptor.outputs, draft.chart.viz_mappings).length === 0;
}

export interface StepStatus {
  unlocked: boolean;
  valid: boolean;
}

/** Steps unlock in order; a step is reachable only while all previous
 * steps stay valid. */
export function stepStatuses(
  draft: BasicDraft,
  descriptor: MethodDescriptorDoc | null,
  schema: ColumnDoc[],
  roles: ChartRoleDoc[] | null,
): Record<WizardStep, StepStatus> {
  const valid: Record<WizardStep, boolean> = {
    dataset: datasetValid(draft),
    filters: filtersValid(draft),
    analysis: analysisValid(draft, descriptor, schema),
    visualization: visualizationValid(draft, descriptor, roles),
  };
  const statuses = {} as Record<WizardStep, StepStatus>;
  let unlocked = true;
  for (const step of STEP_ORDER) {
    statuses[step] = { unlocked, valid: valid[step] };
    unlocked = unlocked && valid[step];
  }
  return statuses;
}

export function previewEnabled(statuses: Record<WizardStep, StepStatus>): boolean {
  return STEP_ORDER.every((step) => statuses[step].valid);
}

export function draftToSpec(draft: BasicDraft): BasicSpecDoc {
  return {
    name: draft.name,
    scope: draft.scope,
    filters: draft.filters,
    method_id: draft.methodId ?? "",
    parameters: draft.parameters,
    mappings: draft.mappings,
    chart: draft.chart,
  };
}

/** Session-wide state shared by the wizard panels. */
export interface EditorSession {
  goalId: string | null;
  questionId: string | null;
  draft: BasicDraft;
  dirty: Partial<Record<WizardStep, boolean>>;
  previewFresh: boolean;
  beginnerMode: boolean;
}

export function newSession(): EditorSession {
  return {
    goalId: null,
    questionId: null,
    draft: emptyDraft(),
    dirty: {},
    previewFresh: false,
    beginnerMode: false,
  };
}

export function markDirty(session: EditorSession, step: WizardStep): void {
  session.dirty[step] = true;
  session.previewFresh = false;
}
