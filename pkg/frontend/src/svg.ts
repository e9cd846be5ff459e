/**
 * Minimal deterministic SVG renderer for line charts with uncertainty bands.
 *
 * Hand-rolled on purpose: the output is a pure function of the input series,
 * which keeps golden-file snapshot tests exact and avoids a headless-browser
 * dependency.
 */

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
}

export interface Band {
  x: number[];
  lo: number[];
  hi: number[];
  color: string;
}

export interface PanelSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  yScale: "linear" | "log";
  series: Series[];
  bands: Band[];
  yDomain?: [number, number];
}

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

const MARGIN = { top: 34, right: 16, bottom: 46, left: 64 };

export function fmt(v: number): string {
  if (v === 0) return "0";
  if (!Number.isFinite(v)) return String(v);
  const abs = Math.abs(v);
  if (abs >= 1e5 || abs < 1e-3) {
    const s = v.toExponential(2).replace(/\.?0+e/, "e");
    return s;
  }
  return String(Number(v.toPrecision(6)));
}

function px(v: number): string {
  return String(Math.round(v * 100) / 100);
}

interface ScaleFn {
  (v: number): number;
  ticks: number[];
}

function niceLinearTicks(lo: number, hi: number, count = 5): number[] {
  if (hi <= lo) return [lo];
  const span = hi - lo;
  const step0 = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= step0) {
      step = m * mag;
      break;
    }
  }
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-12 * span; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return ticks;
}

function makeLinearScale(lo: number, hi: number, p0: number, p1: number): ScaleFn {
  if (hi === lo) {
    hi = lo + 1;
  }
  const f = ((v: number) => p0 + ((v - lo) / (hi - lo)) * (p1 - p0)) as ScaleFn;
  f.ticks = niceLinearTicks(lo, hi);
  return f;
}

function makeLogScale(lo: number, hi: number, p0: number, p1: number): ScaleFn {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi === lo ? lo * 10 : hi);
  const f = ((v: number) => p0 + ((Math.log10(v) - llo) / (lhi - llo)) * (p1 - p0)) as ScaleFn;
  const ticks: number[] = [];
  for (let e = Math.ceil(llo - 1e-9); e <= Math.floor(lhi + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  if (ticks.length === 0) {
    ticks.push(lo, hi);
  }
  f.ticks = ticks;
  return f;
}

function extent(arrays: number[][]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const arr of arrays) {
    for (const v of arr) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  return [lo, hi];
}

function renderPanel(panel: PanelSpec, x0: number, width: number, height: number): string {
  const plotX0 = x0 + MARGIN.left;
  const plotX1 = x0 + width - MARGIN.right;
  const plotY0 = MARGIN.top;
  const plotY1 = height - MARGIN.bottom;

  const [xLo, xHi] = extent(panel.series.map((s) => s.x).concat(panel.bands.map((b) => b.x)));
  const sx = makeLinearScale(xLo, xHi, plotX0, plotX1);

  const yArrays = panel.series
    .map((s) => s.y)
    .concat(panel.bands.flatMap((b) => [b.lo, b.hi]));
  let [yLo, yHi] = panel.yDomain ?? extent(yArrays);
  if (panel.yScale === "linear" && panel.yDomain === undefined) {
    const pad = (yHi - yLo || 1) * 0.05;
    yLo -= pad;
    yHi += pad;
  }
  const sy =
    panel.yScale === "log"
      ? makeLogScale(yLo, yHi, plotY1, plotY0)
      : makeLinearScale(yLo, yHi, plotY1, plotY0);

  const parts: string[] = [];
  parts.push(
    `<rect x="${px(plotX0)}" y="${px(plotY0)}" width="${px(plotX1 - plotX0)}" height="${px(plotY1 - plotY0)}" fill="none" stroke="#333" stroke-width="1"/>`,
  );
  parts.push(
    `<text x="${px((plotX0 + plotX1) / 2)}" y="${px(plotY0 - 14)}" text-anchor="middle" font-size="13" font-weight="bold">${esc(panel.title)}</text>`,
  );

  for (const t of sx.ticks) {
    const X = sx(t);
    if (X < plotX0 - 0.5 || X > plotX1 + 0.5) continue;
    parts.push(`<line x1="${px(X)}" y1="${px(plotY1)}" x2="${px(X)}" y2="${px(plotY1 + 4)}" stroke="#333"/>`);
    parts.push(
      `<text x="${px(X)}" y="${px(plotY1 + 17)}" text-anchor="middle" font-size="10">${fmt(t)}</text>`,
    );
  }
  for (const t of sy.ticks) {
    const Y = sy(t);
    if (Y < plotY0 - 0.5 || Y > plotY1 + 0.5) continue;
    parts.push(`<line x1="${px(plotX0 - 4)}" y1="${px(Y)}" x2="${px(plotX0)}" y2="${px(Y)}" stroke="#333"/>`);
    parts.push(
      `<line x1="${px(plotX0)}" y1="${px(Y)}" x2="${px(plotX1)}" y2="${px(Y)}" stroke="#ddd" stroke-width="0.5"/>`,
    );
    parts.push(
      `<text x="${px(plotX0 - 7)}" y="${px(Y + 3)}" text-anchor="end" font-size="10">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${px((plotX0 + plotX1) / 2)}" y="${px(height - 10)}" text-anchor="middle" font-size="11">${esc(panel.xLabel)}</text>`,
  );
  parts.push(
    `<text x="${px(x0 + 15)}" y="${px((plotY0 + plotY1) / 2)}" text-anchor="middle" font-size="11" transform="rotate(-90 ${px(x0 + 15)} ${px((plotY0 + plotY1) / 2)})">${esc(panel.yLabel)}</text>`,
  );

  for (const band of panel.bands) {
    if (band.x.length === 0) continue;
    const fwd = band.x.map((v, i) => `${px(sx(v))},${px(sy(band.hi[i]))}`);
    const back = [...band.x.keys()].reverse().map((i) => `${px(sx(band.x[i]))},${px(sy(band.lo[i]))}`);
    parts.push(
      `<polygon points="${fwd.concat(back).join(" ")}" fill="${band.color}" fill-opacity="0.18" stroke="none"/>`,
    );
  }
  for (const s of panel.series) {
    const pts = s.x.map((v, i) => `${px(sx(v))},${px(sy(s.y[i]))}`).join(" ");
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${s.color}" stroke-width="1.6"/>`,
    );
  }

  // legend, top-right inside the plot area
  let ly = plotY0 + 8;
  for (const s of panel.series) {
    const lx = plotX1 - 120;
    parts.push(`<line x1="${px(lx)}" y1="${px(ly)}" x2="${px(lx + 18)}" y2="${px(ly)}" stroke="${s.color}" stroke-width="2"/>`);
    parts.push(`<text x="${px(lx + 23)}" y="${px(ly + 3)}" font-size="10">${esc(s.label)}</text>`);
    ly += 14;
  }
  return parts.join("\n");
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderFigure(panels: PanelSpec[], panelWidth = 480, height = 340): string {
  const width = panelWidth * panels.length;
  const body = panels.map((p, i) => renderPanel(p, i * panelWidth, panelWidth, height)).join("\n");
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    body,
    `</svg>`,
    ``,
  ].join("\n");
}
