/**
 * Deterministic SVG rendering of the three-panel sweep figure.
 *
 * Pure string building: fixed styles, fixed tick logic, numbers printed with
 * two decimals, no timestamps or generated ids, so equal inputs produce
 * byte-identical output.
 */

import { Series } from "./csv.js";

export const PANEL_WIDTH = 640;
export const PANEL_HEIGHT = 420;

const MARGIN = { top: 44, right: 24, bottom: 52, left: 64 };
const COLORS: Record<string, string> = {
  baseline: "#1f77b4",
  mqbs: "#d62728",
};
const FALLBACK_COLORS = ["#2ca02c", "#9467bd", "#8c564b", "#e377c2"];

function color(algo: string, i: number): string {
  return COLORS[algo] ?? FALLBACK_COLORS[i % FALLBACK_COLORS.length];
}

const fmt = (v: number): string => {
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
};

interface Scale {
  (value: number): number;
  ticks: number[];
}

function linearScale(lo: number, hi: number, rangeLo: number, rangeHi: number): Scale {
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const span = hi - lo;
  const step = niceStep(span / 5);
  const tickLo = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let t = tickLo; t <= hi + 1e-9; t += step) {
    ticks.push(Math.abs(t) < 1e-9 ? 0 : t);
  }
  const scale = ((value: number) =>
    rangeLo + ((value - lo) / span) * (rangeHi - rangeLo)) as Scale;
  scale.ticks = ticks;
  return scale;
}

function niceStep(rough: number): number {
  const power = Math.pow(10, Math.floor(Math.log10(rough)));
  const unit = rough / power;
  if (unit <= 1) return power;
  if (unit <= 2) return 2 * power;
  if (unit <= 5) return 5 * power;
  return 10 * power;
}

function tickLabel(t: number): string {
  return Number.isInteger(t) ? String(t) : String(Number(t.toFixed(4)));
}

export interface PanelSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

/** One panel: axes, per-algorithm polyline with markers and error bars, legend. */
export function renderPanel(spec: PanelSpec): string {
  const { series } = spec;
  const xs = series.flatMap((s) => s.x);
  const lows = series.flatMap((s) => s.y.map((v, i) => v - s.ci[i]));
  const highs = series.flatMap((s) => s.y.map((v, i) => v + s.ci[i]));
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  const pad = (Math.max(...highs) - Math.min(...lows)) * 0.08 || 1;
  const yLo = Math.min(...lows) - pad;
  const yHi = Math.max(...highs) + pad;

  const plotL = MARGIN.left;
  const plotR = PANEL_WIDTH - MARGIN.right;
  const plotT = MARGIN.top;
  const plotB = PANEL_HEIGHT - MARGIN.bottom;
  const sx = linearScale(xLo, xHi, plotL, plotR);
  const sy = linearScale(yLo, yHi, plotB, plotT);

  const parts: string[] = [];
  parts.push(
    `<rect x="${plotL}" y="${plotT}" width="${plotR - plotL}" height="${plotB - plotT}" fill="none" stroke="#333333" stroke-width="1"/>`,
  );
  for (const t of sx.ticks) {
    const x = fmt(sx(t));
    parts.push(`<line x1="${x}" y1="${plotB}" x2="${x}" y2="${plotB + 5}" stroke="#333333"/>`);
    parts.push(
      `<text x="${x}" y="${plotB + 20}" font-size="12" text-anchor="middle" fill="#333333">${tickLabel(t)}</text>`,
    );
  }
  for (const t of sy.ticks) {
    const y = fmt(sy(t));
    parts.push(`<line x1="${plotL - 5}" y1="${y}" x2="${plotL}" y2="${y}" stroke="#333333"/>`);
    parts.push(
      `<text x="${plotL - 9}" y="${y}" font-size="12" text-anchor="end" dominant-baseline="middle" fill="#333333">${tickLabel(t)}</text>`,
    );
    parts.push(
      `<line x1="${plotL}" y1="${y}" x2="${plotR}" y2="${y}" stroke="#dddddd" stroke-width="0.5"/>`,
    );
  }

  series.forEach((s, si) => {
    const stroke = color(s.algo, si);
    const points = s.x.map((xv, i) => `${fmt(sx(xv))},${fmt(sy(s.y[i]))}`).join(" ");
    s.x.forEach((xv, i) => {
      if (s.ci[i] > 0) {
        const x = fmt(sx(xv));
        const y1 = fmt(sy(s.y[i] - s.ci[i]));
        const y2 = fmt(sy(s.y[i] + s.ci[i]));
        parts.push(`<line x1="${x}" y1="${y1}" x2="${x}" y2="${y2}" stroke="${stroke}" stroke-width="1"/>`);
        const xl = fmt(sx(xv) - 4);
        const xr = fmt(sx(xv) + 4);
        parts.push(`<line x1="${xl}" y1="${y1}" x2="${xr}" y2="${y1}" stroke="${stroke}" stroke-width="1"/>`);
        parts.push(`<line x1="${xl}" y1="${y2}" x2="${xr}" y2="${y2}" stroke="${stroke}" stroke-width="1"/>`);
      }
    });
    parts.push(
      `<polyline points="${points}" fill="none" stroke="${stroke}" stroke-width="1.5"/>`,
    );
    s.x.forEach((xv, i) => {
      parts.push(
        `<circle cx="${fmt(sx(xv))}" cy="${fmt(sy(s.y[i]))}" r="3" fill="${stroke}"/>`,
      );
    });
  });

  series.forEach((s, si) => {
    const stroke = color(s.algo, si);
    const lx = plotL + 12;
    const ly = plotT + 14 + si * 18;
    parts.push(`<line x1="${lx}" y1="${ly}" x2="${lx + 22}" y2="${ly}" stroke="${stroke}" stroke-width="1.5"/>`);
    parts.push(`<circle cx="${lx + 11}" cy="${ly}" r="3" fill="${stroke}"/>`);
    parts.push(
      `<text x="${lx + 28}" y="${ly}" font-size="12" dominant-baseline="middle" fill="#333333">${s.algo}</text>`,
    );
  });

  parts.push(
    `<text x="${PANEL_WIDTH / 2}" y="24" font-size="15" text-anchor="middle" fill="#111111">${spec.title}</text>`,
  );
  parts.push(
    `<text x="${(plotL + plotR) / 2}" y="${PANEL_HEIGHT - 14}" font-size="13" text-anchor="middle" fill="#111111">${spec.xLabel}</text>`,
  );
  parts.push(
    `<text x="18" y="${(plotT + plotB) / 2}" font-size="13" text-anchor="middle" fill="#111111" transform="rotate(-90 18 ${(plotT + plotB) / 2})">${spec.yLabel}</text>`,
  );
  return panelSvg(parts.join("\n  "));
}

function panelSvg(body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${PANEL_WIDTH}" height="${PANEL_HEIGHT}" viewBox="0 0 ${PANEL_WIDTH} ${PANEL_HEIGHT}" font-family="Helvetica, Arial, sans-serif">\n  ` +
    `<rect width="${PANEL_WIDTH}" height="${PANEL_HEIGHT}" fill="#ffffff"/>\n  ` +
    body +
    "\n</svg>\n"
  );
}

/** Stack already-rendered panels into one page. */
export function combinePanels(panels: string[]): string {
  const height = PANEL_HEIGHT * panels.length;
  const inner = panels
    .map((svg, i) => {
      const body = svg
        .replace(/^<svg[^>]*>\n?/, "")
        .replace(/<\/svg>\n?$/, "");
      return `<g transform="translate(0 ${i * PANEL_HEIGHT})">\n${body}</g>`;
    })
    .join("\n");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${PANEL_WIDTH}" height="${height}" viewBox="0 0 ${PANEL_WIDTH} ${height}" font-family="Helvetica, Arial, sans-serif">\n` +
    inner +
    "\n</svg>\n"
  );
}
