/* Renders indicator charts into any page: drop a
   <div data-indicator-id="..."></div> next to this script and it fetches
   the chart document from the engine that served the script and draws it
   as inline SVG. No dependencies. */
(function () {
  "use strict";

  var script = document.currentScript;
  var origin = script ? new URL(script.src, window.location.href).origin : window.location.origin;

  var W = 460, H = 280, PAD = { top: 28, right: 16, bottom: 44, left: 48 };
  var COLORS = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"];

  function el(name, attrs, text) {
    var node = document.createElementNS("http://www.w3.org/2000/svg", name);
    for (var key in attrs) node.setAttribute(key, attrs[key]);
    if (text !== undefined) node.textContent = text;
    return node;
  }

  function frame(title) {
    var svg = el("svg", { viewBox: "0 0 " + W + " " + H, width: "100%" });
    svg.appendChild(el("text", { x: W / 2, y: 16, "text-anchor": "middle", "font-size": 13, "font-weight": "bold" }, title || ""));
    return svg;
  }

  function plotArea() {
    return { x: PAD.left, y: PAD.top, w: W - PAD.left - PAD.right, h: H - PAD.top - PAD.bottom };
  }

  function yAxis(svg, area, max) {
    for (var i = 0; i <= 4; i++) {
      var value = max * i / 4;
      var y = area.y + area.h - area.h * i / 4;
      svg.appendChild(el("line", { x1: area.x, x2: area.x + area.w, y1: y, y2: y, stroke: "#eee" }));
      svg.appendChild(el("text", { x: area.x - 6, y: y + 4, "text-anchor": "end", "font-size": 9 }, value.toFixed(value >= 10 ? 0 : 1)));
    }
  }

  function xLabels(svg, area, domain) {
    var step = Math.max(1, Math.ceil(domain.length / 8));
    domain.forEach(function (label, i) {
      if (i % step) return;
      var x = area.x + area.w * (i + 0.5) / domain.length;
      svg.appendChild(el("text", { x: x, y: area.y + area.h + 14, "text-anchor": "middle", "font-size": 9 }, String(label).slice(0, 12)));
    });
  }

  function legend(svg, names) {
    names.slice(0, 8).forEach(function (name, i) {
      var x = PAD.left + i * 100;
      svg.appendChild(el("rect", { x: x, y: H - 12, width: 9, height: 9, fill: COLORS[i % COLORS.length] }));
      svg.appendChild(el("text", { x: x + 12, y: H - 4, "font-size": 9 }, String(name).slice(0, 14)));
    });
  }

  function drawBars(svg, spec) {
    var area = plotArea(), domain = spec.domain, series = spec.series;
    var max = 1;
    series.forEach(function (s) { s.values.forEach(function (v) { max = Math.max(max, v); }); });
    yAxis(svg, area, max);
    var groups = domain.length || 1, bands = series.length || 1;
    series.forEach(function (s, si) {
      s.values.forEach(function (value, di) {
        var bw = area.w / groups / bands * 0.8;
        var x = area.x + area.w * di / groups + bw * si + area.w / groups * 0.1;
        var h = area.h * value / max;
        svg.appendChild(el("rect", {
          x: x, y: area.y + area.h - h, width: bw, height: h,
          fill: COLORS[si % COLORS.length]
        }));
      });
    });
    xLabels(svg, area, domain);
    if (series.length > 1) legend(svg, series.map(function (s) { return s.name; }));
  }

  function drawLines(svg, spec, stacked) {
    var area = plotArea(), domain = spec.domain, series = spec.series;
    var totals = domain.map(function (_, i) {
      return series.reduce(function (sum, s) { return sum + (s.values[i] || 0); }, 0);
    });
    var max = 1;
    (stacked ? totals : series.flatMap(function (s) { return s.values; })).forEach(function (v) { max = Math.max(max, v); });
    yAxis(svg, area, max);
    var running = domain.map(function () { return 0; });
    series.forEach(function (s, si) {
      var points = s.values.map(function (value, i) {
        var base = stacked ? running[i] : 0;
        if (stacked) running[i] += value;
        var x = area.x + area.w * (i + 0.5) / (domain.length || 1);
        var y = area.y + area.h - area.h * (base + value) / max;
        return [x, y];
      });
      var d = points.map(function (p, i) { return (i ? "L" : "M") + p[0] + " " + p[1]; }).join(" ");
      if (stacked && points.length) {
        var lower = domain.map(function (_, i) {
          var x = area.x + area.w * (i + 0.5) / (domain.length || 1);
          return [x, area.y + area.h - area.h * (running[i] - s.values[i]) / max];
        }).reverse();
        var fill = d + " " + lower.map(function (p) { return "L" + p[0] + " " + p[1]; }).join(" ") + " Z";
        svg.appendChild(el("path", { d: fill, fill: COLORS[si % COLORS.length], "fill-opacity": 0.55, stroke: "none" }));
      }
      svg.appendChild(el("path", { d: d, fill: "none", stroke: COLORS[si % COLORS.length], "stroke-width": 2 }));
    });
    xLabels(svg, area, domain);
    if (series.length > 1) legend(svg, series.map(function (s) { return s.name; }));
  }

  function drawPie(svg, spec) {
    var values = (spec.series[0] || { values: [] }).values;
    var total = values.reduce(function (a, b) { return a + b; }, 0) || 1;
    var cx = W / 2, cy = (H + PAD.top) / 2 - 10, r = Math.min(W, H) / 3;
    var angle = -Math.PI / 2;
    values.forEach(function (value, i) {
      var slice = value / total * Math.PI * 2;
      var x1 = cx + r * Math.cos(angle), y1 = cy + r * Math.sin(angle);
      angle += slice;
      var x2 = cx + r * Math.cos(angle), y2 = cy + r * Math.sin(angle);
      var large = slice > Math.PI ? 1 : 0;
      svg.appendChild(el("path", {
        d: "M" + cx + " " + cy + " L" + x1 + " " + y1 + " A" + r + " " + r + " 0 " + large + " 1 " + x2 + " " + y2 + " Z",
        fill: COLORS[i % COLORS.length], stroke: "#fff"
      }));
    });
    legend(svg, spec.domain);
  }

  function drawScatter(svg, spec) {
    var area = plotArea();
    var xs = [], ys = [];
    spec.series.forEach(function (s) {
      (s.points || []).forEach(function (p) { xs.push(p[0]); ys.push(p[1]); });
    });
    if (!xs.length) return;
    var xmin = Math.min.apply(null, xs), xmax = Math.max.apply(null, xs);
    var ymin = Math.min.apply(null, ys), ymax = Math.max.apply(null, ys);
    var xr = xmax - xmin || 1, yr = ymax - ymin || 1;
    spec.series.forEach(function (s, si) {
      (s.points || []).forEach(function (p) {
        svg.appendChild(el("circle", {
          cx: area.x + area.w * (p[0] - xmin) / xr,
          cy: area.y + area.h - area.h * (p[1] - ymin) / yr,
          r: 3.5, fill: COLORS[si % COLORS.length], "fill-opacity": 0.8
        }));
      });
    });
    if (spec.series.length > 1) legend(svg, spec.series.map(function (s) { return s.name; }));
  }

  function drawBoxes(svg, spec) {
    var area = plotArea();
    var highs = spec.series.map(function (s) { return s.summary.high; });
    var lows = spec.series.map(function (s) { return s.summary.low; });
    spec.series.forEach(function (s) { (s.summary.outliers || []).forEach(function (o) { highs.push(o); lows.push(o); }); });
    var max = Math.max.apply(null, highs.concat([1])), min = Math.min.apply(null, lows.concat([0]));
    var range = max - min || 1;
    function yOf(v) { return area.y + area.h - area.h * (v - min) / range; }
    yAxis(svg, area, max);
    spec.series.forEach(function (s, i) {
      var n = spec.series.length;
      var cx = area.x + area.w * (i + 0.5) / n, bw = area.w / n * 0.4;
      var q = s.summary;
      svg.appendChild(el("line", { x1: cx, x2: cx, y1: yOf(q.low), y2: yOf(q.high), stroke: "#555" }));
      svg.appendChild(el("rect", {
        x: cx - bw / 2, y: yOf(q.q3), width: bw, height: Math.max(1, yOf(q.q1) - yOf(q.q3)),
        fill: COLORS[i % COLORS.length], "fill-opacity": 0.6, stroke: "#555"
      }));
      svg.appendChild(el("line", { x1: cx - bw / 2, x2: cx + bw / 2, y1: yOf(q.median), y2: yOf(q.median), stroke: "#000", "stroke-width": 2 }));
      (q.outliers || []).forEach(function (o) {
        svg.appendChild(el("circle", { cx: cx, cy: yOf(o), r: 2.5, fill: "none", stroke: "#555" }));
      });
    });
    xLabels(svg, area, spec.domain);
  }

  function draw(container, spec) {
    var svg = frame(spec.title);
    if (spec.chart_type === "bar") drawBars(svg, spec);
    else if (spec.chart_type === "line") drawLines(svg, spec, false);
    else if (spec.chart_type === "stacked_area") drawLines(svg, spec, true);
    else if (spec.chart_type === "pie") drawPie(svg, spec);
    else if (spec.chart_type === "scatter") drawScatter(svg, spec);
    else if (spec.chart_type === "box_plot") drawBoxes(svg, spec);
    container.innerHTML = "";
    container.appendChild(svg);
  }

  function render(container) {
    var id = container.getAttribute("data-indicator-id");
    fetch(origin + "/api/v1/render/" + encodeURIComponent(id))
      .then(function (res) {
        if (!res.ok) throw new Error("render failed: " + res.status);
        return res.json();
      })
      .then(function (spec) { draw(container, spec); })
      .catch(function (err) {
        container.textContent = "indicator " + id + " unavailable (" + err.message + ")";
      });
  }

  function boot() {
    var nodes = document.querySelectorAll("div[data-indicator-id]");
    for (var i = 0; i < nodes.length; i++) render(nodes[i]);
  }

  if (document.readyState === "loading") {
    document.addEventListener("DOMContentLoaded", boot);
  } else {
    boot();
  }
})();
