export { parseSweepCsv, toSeries, SchemaError, REQUIRED_COLUMNS } from "./csv.js";
export type { SweepRow, Series } from "./csv.js";
export { renderPanel, combinePanels, PANEL_WIDTH, PANEL_HEIGHT } from "./figure.js";
export type { PanelSpec } from "./figure.js";
export { render } from "./render.js";
export type { FigureSpec, RenderResult } from "./render.js";
