/** Shared preview pane: runs an inline spec through the engine, shows the
 * chart, the analyzed table, and per-stage timings. */

import { renderChartSpec } from "../charts.js";
import { clear, el } from "../dom.js";
import type { EngineClient } from "../api.js";
import type { IndicatorKind, PreviewResultDoc } from "../types.js";

export class PreviewPane {
  readonly root: HTMLElement;
  private output: HTMLElement;
  last: PreviewResultDoc | null = null;

  constructor(private client: EngineClient, testId: string) {
    this.output = el("div", { class: "preview-output", "data-test": `${testId}-output` });
    this.root = el("div", { class: "preview-pane" }, [this.output]);
  }

  async run(kind: IndicatorKind, spec: never | any): Promise<PreviewResultDoc> {
    const result = await this.client.preview(kind, spec);
    this.last = result;
    this.show(result);
    return result;
  }

  private show(result: PreviewResultDoc): void {
    clear(this.output);
    if (result.warnings.length) {
      this.output.append(el("p", { class: "warning" }, [result.warnings.join("; ")]));
    }
    if (result.chart) {
      const holder = el("div", { class: "chart-holder" });
      holder.append(renderChartSpec(result.chart));
      this.output.append(holder);
    }
    const table = el("table", { class: "analyzed" });
    const head = el("tr");
    for (const column of result.analyzed.columns) {
      head.append(el("th", {}, [`${column.name} (${column.type})`]));
    }
    table.append(head);
    for (const row of result.analyzed.rows.slice(0, 25)) {
      const tr = el("tr");
      for (const cell of row) tr.append(el("td", {}, [cell === null ? "" : String(cell)]));
      table.append(tr);
    }
    const shown = Math.min(25, result.analyzed.rows.length);
    this.output.append(
      el("p", { class: "hint" }, [`${result.analyzed.rows.length} analyzed rows (showing ${shown})`]),
      table,
      el("p", { class: "hint timings" }, [
        Object.entries(result.timings)
          .map(([stage, seconds]) => `${stage}: ${(seconds * 1000).toFixed(1)}ms`)
          .join("  ·  "),
      ]),
    );
  }

  clearOutput(): void {
    this.last = null;
    clear(this.output);
  }
}
