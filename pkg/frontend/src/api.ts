/** Thin typed client for the engine API; every engine state change in the
 * editor flows through these calls. */

import type {
  BasicSpecDoc,
  ChartLibraryDoc,
  ChartSpecDoc,
  ColumnDoc,
  CompositeSpecDoc,
  GoalDoc,
  IndicatorKind,
  IndicatorRecordDoc,
  MethodDescriptorDoc,
  MultiLevelSpecDoc,
  PreviewResultDoc,
  QuestionDoc,
  ScopeDoc,
  TableDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public issues: Array<Record<string, unknown>> = [],
  ) {
    super(message);
  }
}

type SpecDoc = BasicSpecDoc | CompositeSpecDoc | MultiLevelSpecDoc;

export class EngineClient {
  constructor(public baseUrl: string, public token: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    if (body !== undefined) headers["Content-Type"] = "application/json";
    const response = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const payload = text ? JSON.parse(text) : null;
    if (!response.ok) {
      const error = payload?.error ?? {};
      throw new ApiError(
        response.status,
        error.code ?? `HTTP${response.status}`,
        error.message ?? response.statusText,
        error.issues ?? [],
      );
    }
    return payload as T;
  }

  // -- exploration -------------------------------------------------------

  dimensionValues(name: string): Promise<{ values: string[] }> {
    return this.request("GET", `/api/v1/dimensions/${encodeURIComponent(name)}`);
  }

  commonAttributes(categories: string[]): Promise<{ attributes: ColumnDoc[] }> {
    const params = new URLSearchParams({ categories: categories.join(",") });
    return this.request("GET", `/api/v1/attributes?${params}`);
  }

  attributeValues(
    scope: ScopeDoc, attribute: string, prefix: string,
  ): Promise<{ values: Array<string | number> }> {
    const params = new URLSearchParams({
      attribute,
      prefix,
      categories: scope.categories.join(","),
      sources: scope.sources.join(","),
      platforms: scope.platforms.join(","),
      actions: scope.actions.join(","),
    });
    return this.request("GET", `/api/v1/attribute-values?${params}`);
  }

  query(scope: ScopeDoc, filters: unknown): Promise<TableDoc> {
    return this.request("POST", "/api/v1/query", { scope, filters });
  }

  // -- methods & charts ----------------------------------------------------

  methods(): Promise<{ methods: MethodDescriptorDoc[] }> {
    return this.request("GET", "/api/v1/methods");
  }

  chartLibraries(): Promise<{ libraries: ChartLibraryDoc[] }> {
    return this.request("GET", "/api/v1/charts");
  }

  suggestMappings(methodId: string, columns: ColumnDoc[]): Promise<{ mappings: Record<string, string> }> {
    return this.request("POST", "/api/v1/mappings/suggest", { method_id: methodId, columns });
  }

  // -- execution --------------------------------------------------------------

  preview(kind: IndicatorKind, spec: SpecDoc): Promise<PreviewResultDoc> {
    return this.request("POST", "/api/v1/preview", { kind, spec });
  }

  render(indicatorId: string): Promise<ChartSpecDoc> {
    return this.request("GET", `/api/v1/render/${encodeURIComponent(indicatorId)}`);
  }

  // -- catalog ------------------------------------------------------------------

  goals(): Promise<{ goals: GoalDoc[] }> {
    return this.request("GET", "/api/v1/goals");
  }

  requestGoal(name: string, description: string): Promise<GoalDoc> {
    return this.request("POST", "/api/v1/goals", { name, description });
  }

  questions(): Promise<{ questions: QuestionDoc[] }> {
    return this.request("GET", "/api/v1/questions");
  }

  createQuestion(goalId: string, text: string): Promise<QuestionDoc> {
    return this.request("POST", "/api/v1/questions", { goal_id: goalId, text });
  }

  associateIndicator(questionId: string, indicatorId: string): Promise<QuestionDoc> {
    return this.request("POST", `/api/v1/questions/${encodeURIComponent(questionId)}/indicators`, {
      indicator_id: indicatorId,
    });
  }

  disassociateIndicator(questionId: string, indicatorId: string): Promise<QuestionDoc> {
    return this.request(
      "DELETE",
      `/api/v1/questions/${encodeURIComponent(questionId)}/indicators/${encodeURIComponent(indicatorId)}`,
    );
  }

  indicators(): Promise<{ indicators: IndicatorRecordDoc[] }> {
    return this.request("GET", "/api/v1/indicators");
  }

  indicator(indicatorId: string): Promise<IndicatorRecordDoc> {
    return this.request("GET", `/api/v1/indicators/${encodeURIComponent(indicatorId)}`);
  }

  saveIndicator(kind: IndicatorKind, spec: SpecDoc): Promise<IndicatorRecordDoc> {
    return this.request("POST", "/api/v1/indicators", { kind, spec });
  }

  copyIndicator(indicatorId: string): Promise<IndicatorRecordDoc> {
    return this.request("POST", `/api/v1/indicators/${encodeURIComponent(indicatorId)}/copy`);
  }

  async ircSnippet(indicatorId: string): Promise<string> {
    return this.fetchText(`/api/v1/irc/${encodeURIComponent(indicatorId)}`);
  }

  async ircQuestionSnippet(questionId: string): Promise<string> {
    return this.fetchText(`/api/v1/irc/question/${encodeURIComponent(questionId)}`);
  }

  private async fetchText(path: string): Promise<string> {
    const response = await fetch(`${this.baseUrl}${path}`);
    if (!response.ok) throw new ApiError(response.status, `HTTP${response.status}`, response.statusText);
    return response.text();
  }
}
