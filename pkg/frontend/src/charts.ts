/** Renders engine chart documents as inline SVG.
 *
 * One adapter per chart family keeps the engine renderer-neutral: both
 * built-in families share the SVG primitives here and differ only in
 * palette/styling, the way separate charting toolkits would.
 */

import type { ChartSpecDoc, ChartSeriesDoc } from "./types.js";

const WIDTH = 480;
const HEIGHT = 300;
const PAD = { top: 30, right: 18, bottom: 48, left: 56 };

interface Theme {
  colors: string[];
  background: string;
  grid: string;
}

const THEMES: Record<string, Theme> = {
  c3js: {
    colors: ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
      "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"],
    background: "#ffffff",
    grid: "#e8e8e8",
  },
  googlecharts: {
    colors: ["#3366cc", "#dc3912", "#ff9900", "#109618", "#990099",
      "#0099c6", "#dd4477", "#66aa00", "#b82e2e", "#316395"],
    background: "#fdfdfd",
    grid: "#dddddd",
  },
};

function svgEl<K extends keyof SVGElementTagNameMap>(
  name: K,
  attrs: Record<string, string | number> = {},
  text?: string,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS("http://www.w3.org/2000/svg", name);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, String(value));
  if (text !== undefined) node.textContent = text;
  return node;
}

function plotArea() {
  return {
    x: PAD.left,
    y: PAD.top,
    w: WIDTH - PAD.left - PAD.right,
    h: HEIGHT - PAD.top - PAD.bottom,
  };
}

function maxValue(series: ChartSeriesDoc[], stacked: boolean, domainLength: number): number {
  let max = 1;
  if (stacked) {
    for (let i = 0; i < domainLength; i++) {
      let total = 0;
      for (const s of series) total += s.values?.[i] ?? 0;
      max = Math.max(max, total);
    }
  } else {
    for (const s of series) for (const v of s.values ?? []) max = Math.max(max, v);
  }
  return max;
}

function drawAxes(svg: SVGSVGElement, theme: Theme, max: number, domain: string[]): void {
  const area = plotArea();
  for (let i = 0; i <= 4; i++) {
    const y = area.y + area.h - (area.h * i) / 4;
    const value = (max * i) / 4;
    svg.appendChild(svgEl("line", { x1: area.x, x2: area.x + area.w, y1: y, y2: y, stroke: theme.grid }));
    svg.appendChild(svgEl("text", {
      x: area.x - 8, y: y + 4, "text-anchor": "end", "font-size": 10,
    }, value >= 10 ? value.toFixed(0) : value.toFixed(1)));
  }
  const step = Math.max(1, Math.ceil(domain.length / 8));
  domain.forEach((label, i) => {
    if (i % step) return;
    const x = area.x + (area.w * (i + 0.5)) / domain.length;
    svg.appendChild(svgEl("text", {
      x, y: area.y + area.h + 16, "text-anchor": "middle", "font-size": 10,
    }, label.slice(0, 14)));
  });
}

function drawLegend(svg: SVGSVGElement, theme: Theme, names: string[]): void {
  names.slice(0, 6).forEach((name, i) => {
    const x = PAD.left + i * 110;
    svg.appendChild(svgEl("rect", {
      x, y: HEIGHT - 14, width: 10, height: 10, fill: theme.colors[i % theme.colors.length],
    }));
    svg.appendChild(svgEl("text", { x: x + 14, y: HEIGHT - 5, "font-size": 10 }, name.slice(0, 15)));
  });
}

function drawBars(svg: SVGSVGElement, spec: ChartSpecDoc, theme: Theme): void {
  const area = plotArea();
  const max = maxValue(spec.series, false, spec.domain.length);
  drawAxes(svg, theme, max, spec.domain);
  const groups = Math.max(1, spec.domain.length);
  const bands = Math.max(1, spec.series.length);
  spec.series.forEach((series, si) => {
    (series.values ?? []).forEach((value, di) => {
      const bandWidth = (area.w / groups / bands) * 0.8;
      const x = area.x + (area.w * di) / groups + bandWidth * si + (area.w / groups) * 0.1;
      const h = (area.h * value) / max;
      svg.appendChild(svgEl("rect", {
        x, y: area.y + area.h - h, width: bandWidth, height: Math.max(0, h),
        fill: theme.colors[si % theme.colors.length],
      }));
    });
  });
  if (spec.series.length > 1) drawLegend(svg, theme, spec.series.map((s) => s.name));
}

function drawLines(svg: SVGSVGElement, spec: ChartSpecDoc, theme: Theme, stacked: boolean): void {
  const area = plotArea();
  const max = maxValue(spec.series, stacked, spec.domain.length);
  drawAxes(svg, theme, max, spec.domain);
  const running = spec.domain.map(() => 0);
  spec.series.forEach((series, si) => {
    const values = series.values ?? [];
    const upper: Array<[number, number]> = values.map((value, i) => {
      const base = stacked ? running[i] : 0;
      if (stacked) running[i] += value;
      const x = area.x + (area.w * (i + 0.5)) / Math.max(1, spec.domain.length);
      const y = area.y + area.h - (area.h * (base + value)) / max;
      return [x, y];
    });
    const color = theme.colors[si % theme.colors.length];
    const path = upper.map(([x, y], i) => `${i ? "L" : "M"}${x} ${y}`).join(" ");
    if (stacked && upper.length) {
      const lower = values
        .map((value, i) => {
          const x = area.x + (area.w * (i + 0.5)) / Math.max(1, spec.domain.length);
          const y = area.y + area.h - (area.h * (running[i] - value)) / max;
          return `L${x} ${y}`;
        })
        .reverse()
        .join(" ");
      svg.appendChild(svgEl("path", {
        d: `${path} ${lower} Z`, fill: color, "fill-opacity": 0.55, stroke: "none",
      }));
    }
    svg.appendChild(svgEl("path", { d: path, fill: "none", stroke: color, "stroke-width": 2 }));
  });
  if (spec.series.length > 1) drawLegend(svg, theme, spec.series.map((s) => s.name));
}

function drawPie(svg: SVGSVGElement, spec: ChartSpecDoc, theme: Theme): void {
  const values = spec.series[0]?.values ?? [];
  const total = values.reduce((a, b) => a + b, 0) || 1;
  const cx = WIDTH / 2;
  const cy = (HEIGHT + PAD.top) / 2 - 12;
  const r = Math.min(WIDTH, HEIGHT) / 3.2;
  let angle = -Math.PI / 2;
  values.forEach((value, i) => {
    const slice = (value / total) * Math.PI * 2;
    const x1 = cx + r * Math.cos(angle);
    const y1 = cy + r * Math.sin(angle);
    angle += slice;
    const x2 = cx + r * Math.cos(angle);
    const y2 = cy + r * Math.sin(angle);
    const large = slice > Math.PI ? 1 : 0;
    svg.appendChild(svgEl("path", {
      d: `M${cx} ${cy} L${x1} ${y1} A${r} ${r} 0 ${large} 1 ${x2} ${y2} Z`,
      fill: theme.colors[i % theme.colors.length],
      stroke: theme.background,
    }));
  });
  drawLegend(svg, theme, spec.domain);
}

function drawScatter(svg: SVGSVGElement, spec: ChartSpecDoc, theme: Theme): void {
  const area = plotArea();
  const xs: number[] = [];
  const ys: number[] = [];
  for (const series of spec.series) {
    for (const [x, y] of series.points ?? []) {
      xs.push(x);
      ys.push(y);
    }
  }
  if (!xs.length) return;
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMin = Math.min(...ys);
  const yMax = Math.max(...ys);
  const xRange = xMax - xMin || 1;
  const yRange = yMax - yMin || 1;
  spec.series.forEach((series, si) => {
    for (const [x, y] of series.points ?? []) {
      svg.appendChild(svgEl("circle", {
        cx: area.x + (area.w * (x - xMin)) / xRange,
        cy: area.y + area.h - (area.h * (y - yMin)) / yRange,
        r: 4,
        fill: theme.colors[si % theme.colors.length],
        "fill-opacity": 0.8,
      }));
    }
  });
  if (spec.series.length > 1) drawLegend(svg, theme, spec.series.map((s) => s.name));
}

function drawBoxes(svg: SVGSVGElement, spec: ChartSpecDoc, theme: Theme): void {
  const area = plotArea();
  const highs: number[] = [1];
  const lows: number[] = [0];
  for (const series of spec.series) {
    const summary = series.summary;
    if (!summary) continue;
    highs.push(summary.high, ...summary.outliers);
    lows.push(summary.low, ...summary.outliers);
  }
  const max = Math.max(...highs);
  const min = Math.min(...lows);
  const range = max - min || 1;
  const yOf = (v: number) => area.y + area.h - (area.h * (v - min)) / range;
  drawAxes(svg, theme, max, spec.domain);
  const count = Math.max(1, spec.series.length);
  spec.series.forEach((series, i) => {
    const summary = series.summary;
    if (!summary) return;
    const cx = area.x + (area.w * (i + 0.5)) / count;
    const boxWidth = (area.w / count) * 0.4;
    const color = theme.colors[i % theme.colors.length];
    svg.appendChild(svgEl("line", { x1: cx, x2: cx, y1: yOf(summary.low), y2: yOf(summary.high), stroke: "#555" }));
    svg.appendChild(svgEl("rect", {
      x: cx - boxWidth / 2, y: yOf(summary.q3),
      width: boxWidth, height: Math.max(1, yOf(summary.q1) - yOf(summary.q3)),
      fill: color, "fill-opacity": 0.6, stroke: "#555",
    }));
    svg.appendChild(svgEl("line", {
      x1: cx - boxWidth / 2, x2: cx + boxWidth / 2,
      y1: yOf(summary.median), y2: yOf(summary.median), stroke: "#000", "stroke-width": 2,
    }));
    for (const outlier of summary.outliers) {
      svg.appendChild(svgEl("circle", { cx, cy: yOf(outlier), r: 3, fill: "none", stroke: "#555" }));
    }
  });
}

export function renderChartSpec(spec: ChartSpecDoc): SVGSVGElement {
  const theme = THEMES[spec.library] ?? THEMES.c3js;
  const svg = svgEl("svg", { viewBox: `0 0 ${WIDTH} ${HEIGHT}`, width: "100%" });
  svg.appendChild(svgEl("rect", { x: 0, y: 0, width: WIDTH, height: HEIGHT, fill: theme.background }));
  svg.appendChild(svgEl("text", {
    x: WIDTH / 2, y: 18, "text-anchor": "middle", "font-size": 13, "font-weight": "bold",
  }, spec.title));

  switch (spec.chart_type) {
    case "bar": drawBars(svg, spec, theme); break;
    case "line": drawLines(svg, spec, theme, false); break;
    case "stacked_area": drawLines(svg, spec, theme, true); break;
    case "pie": drawPie(svg, spec, theme); break;
    case "scatter": drawScatter(svg, spec, theme); break;
    case "box_plot": drawBoxes(svg, spec, theme); break;
  }
  return svg;
}
