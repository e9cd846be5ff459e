export { AGGREGATE_HEADER, InputError, parseAggregateCsv, readAggregateCsv } from "./csv.js";
export type { AggregateSeries } from "./csv.js";
export { movingAverage } from "./smooth.js";
export { fmt, PALETTE, renderFigure } from "./svg.js";
export type { Band, PanelSpec, Series } from "./svg.js";
export {
  buildBanditPanels,
  buildConvergencePanel,
  renderBandit,
  renderConvergence,
} from "./figures.js";
export type { BanditSpec, ConvergenceSpec, FigureSpec, LabeledInput } from "./figures.js";
export { main } from "./cli.js";
