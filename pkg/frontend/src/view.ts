/** Formatting and SVG-path helpers (pure), plus the DOM renderers.
 *
 * Numbers shown to the user are taken verbatim from service responses;
 * the helpers here only format and plot them.
 */

import { RouletteState } from "./state.js";
import { AnalysisReport, BfFields, PriorDto } from "./types.js";

export function formatNumber(x: number, digits = 3): string {
  if (!Number.isFinite(x)) {
    return String(x);
  }
  const abs = Math.abs(x);
  if (abs !== 0 && (abs >= 1e6 || abs < 1e-4)) {
    return x.toExponential(digits);
  }
  return x.toLocaleString("en-US", { maximumFractionDigits: digits });
}

/** Display string for a Bayes factor; falls back to the log scale when
 * the service flagged the linear value as unrepresentable. */
export function formatBf(fields: BfFields): string {
  if (fields.bf_log_only || fields.bf === null) {
    return `exp(${formatNumber(fields.log_bf)})`;
  }
  return formatNumber(fields.bf);
}

export function describePrior(prior: PriorDto): string {
  const trunc =
    prior.truncation === "none" ? "" : `, ${prior.truncation === "pos" ? "positive" : "negative"} half`;
  if (prior.family === "t") {
    return `t(${formatNumber(prior.location!)}, ${formatNumber(prior.scale!)}, ${formatNumber(prior.df!)})${trunc}`;
  }
  return `Normal(${formatNumber(prior.mean!)}, ${formatNumber(prior.variance!)})${trunc}`;
}

/** Polyline "x0,y0 x1,y1 ..." for a density curve in an SVG viewport;
 * y is flipped (SVG grows downward) and scaled to yMax. */
export function densityPoints(
  xs: number[],
  ys: number[],
  width: number,
  height: number,
  xLo: number,
  xHi: number,
  yMax: number,
): string {
  if (xs.length !== ys.length || xs.length === 0 || !(xHi > xLo) || !(yMax > 0)) {
    return "";
  }
  const pts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    const px = ((xs[i] - xLo) / (xHi - xLo)) * width;
    const py = height - (Math.min(ys[i], yMax) / yMax) * height;
    pts.push(`${px.toFixed(2)},${py.toFixed(2)}`);
  }
  return pts.join(" ");
}

const SVG_NS = "http://www.w3.org/2000/svg";

export interface RouletteViewHooks {
  onChip: (binIndex: number, delta: 1 | -1) => void;
}

export function renderRoulette(
  container: HTMLElement,
  state: RouletteState,
  hooks: RouletteViewHooks,
  maxChips = 15,
): void {
  container.textContent = "";
  const bins = state.chipCounts.length;
  for (let i = 0; i < bins; i++) {
    const column = document.createElement("div");
    column.className = "bin";
    column.title = `bin [${formatNumber(state.binEdges[i])}, ${formatNumber(state.binEdges[i + 1])})\nleft click: add chip, right click: remove`;
    const stack = document.createElement("div");
    stack.className = "chips";
    for (let c = 0; c < Math.min(state.chipCounts[i], maxChips); c++) {
      const chip = document.createElement("div");
      chip.className = "chip";
      stack.appendChild(chip);
    }
    const count = document.createElement("div");
    count.className = "count";
    count.textContent = String(state.chipCounts[i]);
    const label = document.createElement("div");
    label.className = "edge";
    label.textContent = formatNumber(state.binEdges[i], 2);
    column.append(stack, count, label);
    column.addEventListener("click", () => hooks.onChip(i, 1));
    column.addEventListener("contextmenu", (ev) => {
      ev.preventDefault();
      hooks.onChip(i, -1);
    });
    container.appendChild(column);
  }
}

export function renderFitReadout(
  paramsEl: HTMLElement,
  percentilesEl: HTMLElement,
  overlaySvg: SVGSVGElement,
  state: RouletteState,
): void {
  overlaySvg.textContent = "";
  if (state.fitted === null) {
    paramsEl.textContent = state.dirty ? "fitting..." : "place chips to fit a prior";
    percentilesEl.textContent = "";
    return;
  }
  const fit = state.fitted;
  paramsEl.textContent =
    `fitted: ${describePrior(fit.prior)}` + (fit.converged ? "" : " (not converged)");
  const fb = fit.percentile_feedback;
  percentilesEl.textContent =
    `implied percentiles: 33% = ${formatNumber(fb.p33)}, ` +
    `50% = ${formatNumber(fb.p50)}, 66% = ${formatNumber(fb.p66)}`;
  if (fit.overlay) {
    const { delta, density } = fit.overlay;
    const width = 600;
    const height = 120;
    overlaySvg.setAttribute("viewBox", `0 0 ${width} ${height}`);
    const line = document.createElementNS(SVG_NS, "polyline");
    line.setAttribute(
      "points",
      densityPoints(
        delta,
        density,
        width,
        height,
        state.binEdges[0],
        state.binEdges[state.binEdges.length - 1],
        Math.max(...density),
      ),
    );
    line.setAttribute("class", "overlay-line");
    line.setAttribute("fill", "none");
    overlaySvg.appendChild(line);
  }
}

export function renderReport(
  container: HTMLElement,
  chartSvg: SVGSVGElement,
  report: AnalysisReport,
): void {
  container.textContent = "";
  const rows: Array<[string, string]> = [];
  rows.push(["BF10 (two-sided)", formatBf(report.bf10)]);
  rows.push(["log BF10", formatNumber(report.bf10.log_bf, 6)]);
  if (report.one_sided) {
    const tag = report.one_sided.orientation === "neg" ? "BF-0" : "BF+0";
    rows.push([`${tag} (one-sided)`, formatBf(report.one_sided)]);
  }
  rows.push(["posterior median", formatNumber(report.posterior.median, 4)]);
  rows.push([
    "95% credible interval",
    `[${formatNumber(report.posterior.ci_lower_95, 4)}, ${formatNumber(report.posterior.ci_upper_95, 4)}]`,
  ]);
  if (report.default_comparison) {
    rows.push([
      "default-prior BF10",
      formatBf(report.default_comparison.bf10),
    ]);
    rows.push([
      "informed vs default",
      formatBf(report.default_comparison.informed_vs_default),
    ]);
  }
  const table = document.createElement("table");
  for (const [label, value] of rows) {
    const tr = document.createElement("tr");
    const th = document.createElement("th");
    th.textContent = label;
    const td = document.createElement("td");
    td.textContent = value;
    td.dataset.label = label;
    tr.append(th, td);
    table.appendChild(tr);
  }
  container.appendChild(table);

  chartSvg.textContent = "";
  if (report.grid) {
    const { delta, prior_density, posterior_density } = report.grid;
    const width = 600;
    const height = 220;
    chartSvg.setAttribute("viewBox", `0 0 ${width} ${height}`);
    const yMax = Math.max(...posterior_density, ...prior_density);
    const xLo = delta[0];
    const xHi = delta[delta.length - 1];
    for (const [ys, cls] of [
      [prior_density, "prior-line"],
      [posterior_density, "posterior-line"],
    ] as Array<[number[], string]>) {
      const line = document.createElementNS(SVG_NS, "polyline");
      line.setAttribute(
        "points",
        densityPoints(delta, ys, width, height, xLo, xHi, yMax),
      );
      line.setAttribute("class", cls);
      line.setAttribute("fill", "none");
      chartSvg.appendChild(line);
    }
  }
}
