/** Wire the roulette grid, fit readout, and analysis panel to the DOM. */

import { ApiClient } from "./api.js";
import {
  AnalysisController,
  AnalysisInputs,
  ElicitationController,
} from "./controller.js";
import { renderFitReadout, renderReport, renderRoulette } from "./view.js";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
}

function boot(): void {
  const api = new ApiClient("");
  const rouletteEl = byId<HTMLDivElement>("roulette");
  const fitParamsEl = byId<HTMLDivElement>("fit-params");
  const fitPercentilesEl = byId<HTMLDivElement>("fit-percentiles");
  const fitStatusEl = byId<HTMLDivElement>("fit-status");
  const overlaySvg = byId<HTMLElement>("fit-overlay") as unknown as SVGSVGElement;
  const reportEl = byId<HTMLDivElement>("report");
  const chartSvg = byId<HTMLElement>("report-chart") as unknown as SVGSVGElement;
  const analysisError = byId<HTMLDivElement>("analysis-error");

  const controller = new ElicitationController(api, {
    onState: (state) => {
      renderRoulette(rouletteEl, state, {
        onChip: (i, delta) => controller.editChip(i, delta),
      });
      renderFitReadout(fitParamsEl, fitPercentilesEl, overlaySvg, state);
    },
    onFitPending: () => {
      fitStatusEl.textContent = "fitting...";
    },
    onFitSkipped: (reason) => {
      fitStatusEl.textContent = reason;
    },
    onFitError: (message) => {
      fitStatusEl.textContent = `fit failed: ${message}`;
    },
    onNoop: () => {
      fitStatusEl.textContent = "that bin is already empty";
      rouletteEl.classList.remove("flash");
      void rouletteEl.offsetWidth; // restart the animation
      rouletteEl.classList.add("flash");
    },
  });

  const analysis = new AnalysisController(
    api,
    () => controller.state.fitted?.prior ?? null,
    (report) => {
      analysisError.textContent = "";
      renderReport(reportEl, chartSvg, report);
    },
    (message) => {
      analysisError.textContent = message;
    },
  );

  byId<HTMLButtonElement>("apply-grid").addEventListener("click", () => {
    const lo = Number(byId<HTMLInputElement>("range-lo").value);
    const hi = Number(byId<HTMLInputElement>("range-hi").value);
    const bins = Number(byId<HTMLInputElement>("bin-count").value);
    try {
      controller.setGrid(lo, hi, bins);
      fitStatusEl.textContent = "";
    } catch (err) {
      fitStatusEl.textContent = err instanceof Error ? err.message : String(err);
    }
  });

  byId<HTMLSelectElement>("fit-df").addEventListener("change", (ev) => {
    const value = (ev.target as HTMLSelectElement).value;
    controller.setFitDf(value === "free" ? null : Number(value));
  });

  byId<HTMLFormElement>("analysis-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    const n2raw = byId<HTMLInputElement>("input-n2").value.trim();
    const inputs: AnalysisInputs = {
      t: Number(byId<HTMLInputElement>("input-t").value),
      n1: Number(byId<HTMLInputElement>("input-n1").value),
      side: byId<HTMLSelectElement>("input-side").value as "two" | "pos" | "neg",
      useElicitedPrior:
        byId<HTMLSelectElement>("input-prior").value === "elicited",
      compareDefault: byId<HTMLInputElement>("input-compare").checked,
    };
    if (n2raw !== "") {
      inputs.n2 = Number(n2raw);
    }
    void analysis.run(inputs);
  });

  // initial paint + service check
  renderRoulette(rouletteEl, controller.state, {
    onChip: (i, delta) => controller.editChip(i, delta),
  });
  renderFitReadout(fitParamsEl, fitPercentilesEl, overlaySvg, controller.state);
  api
    .health()
    .then(() => {
      fitStatusEl.textContent = "service ready";
    })
    .catch(() => {
      fitStatusEl.textContent = "service unreachable";
    });
}

document.addEventListener("DOMContentLoaded", boot);
