/** Figure assembly: CSV file in, three panel SVGs plus a combined page out. */

import { readFileSync, writeFileSync, mkdirSync } from "node:fs";
import { join } from "node:path";

import { parseSweepCsv, toSeries, SchemaError } from "./csv.js";
import { combinePanels, renderPanel } from "./figure.js";

export interface FigureSpec {
  csvPath: string;
  outDir: string;
  format: "svg";
  /** x-axis label; defaults to the CSV's sweep_var */
  sweepLabel?: string;
}

const SWEEP_LABELS: Record<string, string> = {
  object_count: "number of objects",
  camera_count: "number of cameras",
  angle_of_view: "angle of view (degrees)",
  distance_of_view: "distance of view (m)",
};

export interface RenderResult {
  files: string[];
}

/** Render the three panels; throws SchemaError / I/O errors to the caller. */
export function render(spec: FigureSpec): RenderResult {
  if (spec.format !== "svg") {
    throw new SchemaError(`unsupported format: ${spec.format} (only svg)`);
  }
  const text = readFileSync(spec.csvPath, "utf-8");
  const rows = parseSweepCsv(text);
  const sweepVar = rows[0].sweepVar;
  const xLabel = spec.sweepLabel ?? SWEEP_LABELS[sweepVar] ?? sweepVar;

  const panels = [
    renderPanel({
      title: "(a) Minimum RBs to satisfy coverage",
      xLabel,
      yLabel: "resource blocks",
      series: toSeries(rows, "min_rb"),
    }),
    renderPanel({
      title: "(b) Monitoring quality at minimum RBs",
      xLabel,
      yLabel: "total quality",
      series: toSeries(rows, "q_minrb"),
    }),
    renderPanel({
      title: "(c) Monitoring quality with all RBs",
      xLabel,
      yLabel: "total quality",
      series: toSeries(rows, "q_all"),
    }),
  ];

  mkdirSync(spec.outDir, { recursive: true });
  const names = ["panel_a.svg", "panel_b.svg", "panel_c.svg"];
  const files: string[] = [];
  panels.forEach((svg, i) => {
    const path = join(spec.outDir, names[i]);
    writeFileSync(path, svg, "utf-8");
    files.push(path);
  });
  const combined = join(spec.outDir, "combined.svg");
  writeFileSync(combined, combinePanels(panels), "utf-8");
  files.push(combined);
  return { files };
}
