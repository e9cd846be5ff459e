/**
 * The two figure builders.
 *
 * Convergence: one curve per labeled aggregate CSV, log-scale y over
 * cumulative oracle calls, 5/95-percentile band per curve (omitted when the
 * band is degenerate, e.g. a single-run aggregate).
 *
 * Bandit: two panels — cumulative regret with a 5/95-percentile band, and the
 * best-arm probability smoothed by a moving average with a +-std band.
 * Smoothing applies to the probability panel only, never to regret.
 */

import { AggregateSeries, InputError, readAggregateCsv } from "./csv.js";
import { movingAverage } from "./smooth.js";
import { Band, PALETTE, PanelSpec, renderFigure, Series } from "./svg.js";

export interface LabeledInput {
  path: string;
  label: string;
}

export interface ConvergenceSpec {
  kind: "convergence";
  inputs: LabeledInput[];
  output: string;
  band?: "percentile" | "none";
  yLabel?: string;
  title?: string;
}

export interface BanditSpec {
  kind: "bandit";
  regret: LabeledInput[];
  probability: LabeledInput[];
  output: string;
  window?: number;
  title?: string;
}

export type FigureSpec = ConvergenceSpec | BanditSpec;

function bandIsDegenerate(agg: AggregateSeries): boolean {
  return agg.p05.every((lo, i) => lo === agg.p95[i]);
}

const LOG_FLOOR_RATIO = 1e-2;

/** Clamp non-positive values so a log axis stays well-defined. */
function logSafe(values: number[]): number[] {
  const positives = values.filter((v) => v > 0);
  const floor = positives.length ? Math.min(...positives) * LOG_FLOOR_RATIO : 1e-12;
  return values.map((v) => (v > 0 ? v : floor));
}

export function buildConvergencePanel(spec: ConvergenceSpec): PanelSpec {
  if (!spec.inputs?.length) {
    throw new InputError("convergence spec needs at least one input");
  }
  const series: Series[] = [];
  const bands: Band[] = [];
  spec.inputs.forEach((inp, i) => {
    const agg = readAggregateCsv(inp.path);
    const color = PALETTE[i % PALETTE.length];
    series.push({ label: inp.label, x: agg.buckets, y: logSafe(agg.mean), color });
    if (spec.band !== "none" && !bandIsDegenerate(agg)) {
      bands.push({ x: agg.buckets, lo: logSafe(agg.p05), hi: logSafe(agg.p95), color });
    }
  });
  return {
    title: spec.title ?? "Convergence",
    xLabel: "oracle calls",
    yLabel: spec.yLabel ?? "gap",
    yScale: "log",
    series,
    bands,
  };
}

export function buildBanditPanels(spec: BanditSpec): PanelSpec[] {
  if (!spec.regret?.length || !spec.probability?.length) {
    throw new InputError("bandit spec needs regret and probability inputs");
  }
  const window = spec.window ?? 30;
  const regretSeries: Series[] = [];
  const regretBands: Band[] = [];
  spec.regret.forEach((inp, i) => {
    const agg = readAggregateCsv(inp.path);
    const color = PALETTE[i % PALETTE.length];
    regretSeries.push({ label: inp.label, x: agg.buckets, y: agg.mean, color });
    if (!bandIsDegenerate(agg)) {
      regretBands.push({ x: agg.buckets, lo: agg.p05, hi: agg.p95, color });
    }
  });
  const probSeries: Series[] = [];
  const probBands: Band[] = [];
  spec.probability.forEach((inp, i) => {
    const agg = readAggregateCsv(inp.path);
    const color = PALETTE[i % PALETTE.length];
    const mean = movingAverage(agg.mean, window);
    const std = movingAverage(agg.std, window);
    probSeries.push({ label: inp.label, x: agg.buckets, y: mean, color });
    probBands.push({
      x: agg.buckets,
      lo: mean.map((m, j) => m - std[j]),
      hi: mean.map((m, j) => m + std[j]),
      color,
    });
  });
  return [
    {
      title: spec.title ? `${spec.title}: regret` : "Cumulative regret",
      xLabel: "t",
      yLabel: "regret",
      yScale: "linear",
      series: regretSeries,
      bands: regretBands,
    },
    {
      title: "Best-arm probability",
      xLabel: "t",
      yLabel: `P(optimal), window ${window}`,
      yScale: "linear",
      series: probSeries,
      bands: probBands,
      yDomain: [0, 1],
    },
  ];
}

export function renderConvergence(spec: ConvergenceSpec): string {
  return renderFigure([buildConvergencePanel(spec)], 640, 400);
}

export function renderBandit(spec: BanditSpec): string {
  return renderFigure(buildBanditPanels(spec), 480, 360);
}
