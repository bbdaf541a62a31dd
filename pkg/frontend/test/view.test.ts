import assert from "node:assert/strict";
import { test } from "node:test";

import { densityPoints, describePrior, formatBf, formatNumber } from "../src/view.js";

test("formatNumber picks sensible notations", () => {
  assert.equal(formatNumber(0.35), "0.35");
  assert.equal(formatNumber(2483125.15), "2.483e+6");
  assert.equal(formatNumber(2483.12, 1), "2,483.1");
  assert.equal(formatNumber(0.00001234), "1.234e-5");
});

test("formatBf falls back to the log scale when flagged", () => {
  assert.equal(formatBf({ log_bf: 800.0, bf: null, bf_log_only: true }), "exp(800)");
  assert.equal(formatBf({ log_bf: Math.log(4), bf: 4.0, bf_log_only: false }), "4");
});

test("describePrior covers both families and truncation", () => {
  assert.equal(
    describePrior({ family: "t", location: 0.35, scale: 0.102, df: 3, truncation: "none" }),
    "t(0.35, 0.102, 3)",
  );
  assert.equal(
    describePrior({ family: "normal", mean: 0, variance: 0.5, truncation: "pos" }),
    "Normal(0, 0.5), positive half",
  );
});

test("densityPoints maps the curve into the viewport", () => {
  const pts = densityPoints([0, 1, 2], [0, 2, 1], 100, 50, 0, 2, 2);
  assert.equal(pts, "0.00,50.00 50.00,0.00 100.00,25.00");
});

test("densityPoints degrades to empty on bad input", () => {
  assert.equal(densityPoints([0, 1], [1], 100, 50, 0, 1, 1), "");
  assert.equal(densityPoints([], [], 100, 50, 0, 1, 1), "");
  assert.equal(densityPoints([0, 1], [1, 1], 100, 50, 1, 1, 1), "");
});
