/** Wire types for the engine's /api/v1 surface. */

export type ColumnType = "Text" | "Numeric";

export interface ColumnDoc {
  name: string;
  type: ColumnType;
}

/** Fixed leading columns of every dataset table (wire contract). */
export const BASE_COLUMNS: ColumnDoc[] = [
  { name: "Event Id", type: "Text" },
  { name: "User", type: "Text" },
  { name: "Timestamp", type: "Numeric" },
  { name: "Source", type: "Text" },
  { name: "Platform", type: "Text" },
  { name: "Action", type: "Text" },
  { name: "Category", type: "Text" },
];

export interface MethodInputDoc {
  name: string;
  type: ColumnType;
  required: boolean;
}

export interface MethodParameterDoc {
  name: string;
  type: ColumnType;
  default: number | string;
}

export interface MethodDescriptorDoc {
  id: string;
  name: string;
  inputs: MethodInputDoc[];
  outputs: ColumnDoc[];
  parameters: MethodParameterDoc[];
}

export interface ChartRoleDoc {
  role: string;
  type: ColumnType;
  required: boolean;
}

export interface ChartTypeDoc {
  chart_type: string;
  roles: ChartRoleDoc[];
}

export interface ChartLibraryDoc {
  library_id: string;
  name: string;
  charts: ChartTypeDoc[];
}

export interface GoalDoc {
  goal_id: string;
  name: string;
  description: string;
  status: "active" | "requested";
}

export interface QuestionDoc {
  question_id: string;
  goal_id: string;
  text: string;
  owner: string;
  indicator_ids: string[];
}

export type IndicatorKind = "basic" | "composite" | "multilevel";

export interface IndicatorRecordDoc {
  indicator_id: string;
  kind: IndicatorKind;
  spec: Record<string, unknown>;
  owner: string;
  created_at: number;
}

export interface ScopeDoc {
  sources: string[];
  platforms: string[];
  actions: string[];
  categories: string[];
}

export interface AttributeFilterDoc {
  attribute: string;
  values: Array<string | number>;
}

export interface FiltersDoc {
  attribute_filters: AttributeFilterDoc[];
  time_start: string | null;
  time_end: string | null;
  privacy_mode: string;
}

export interface ChartChoiceDoc {
  library_id: string;
  chart_type: string;
  viz_mappings: Record<string, string>;
}

export interface BasicSpecDoc {
  name: string;
  scope: ScopeDoc;
  filters: FiltersDoc;
  method_id: string;
  parameters: Record<string, number | string>;
  mappings: Record<string, string>;
  chart: ChartChoiceDoc | null;
}

export interface CompositeSpecDoc {
  name: string;
  parts: string[];
  chart: ChartChoiceDoc | null;
}

export interface MultiLevelSpecDoc {
  name: string;
  parts: string[];
  merge_attribute: string;
  second_method_id: string;
  second_parameters: Record<string, number | string>;
  second_mappings: Record<string, string>;
  chart: ChartChoiceDoc | null;
}

export interface TableDoc {
  columns: ColumnDoc[];
  rows: Array<Array<string | number | null>>;
}

export interface ChartSeriesDoc {
  name: string;
  values?: number[];
  points?: Array<[number, number]>;
  labels?: string[];
  summary?: {
    low: number;
    q1: number;
    median: number;
    q3: number;
    high: number;
    outliers: number[];
  };
}

export interface ChartSpecDoc {
  chart_type: string;
  library: string;
  title: string;
  x_label: string;
  y_label: string;
  domain: string[];
  series: ChartSeriesDoc[];
}

export interface PreviewResultDoc {
  analyzed: TableDoc;
  chart: ChartSpecDoc | null;
  timings: Record<string, number>;
  warnings: string[];
}

export interface IngestReportDoc {
  accepted: number;
  rejected: number;
  rejections: Array<{ index: number; issues: Array<Record<string, unknown>> }>;
}

export interface IssueDoc {
  code: string;
  message: string;
  field?: string;
}
