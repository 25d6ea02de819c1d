/**
 * Parsing and validation of camsched sweep CSVs.
 *
 * The harness schema is fixed; unknown extra columns are ignored, missing
 * required columns raise a SchemaError naming exactly what was expected.
 */

export const REQUIRED_COLUMNS = [
  "sweep_var",
  "sweep_value",
  "algo",
  "min_rb_mean",
  "min_rb_ci95",
  "q_minrb_mean",
  "q_all_mean",
  "q_all_ci95",
  "feasible_frac",
  "runs",
] as const;

export class SchemaError extends Error {}

export interface SweepRow {
  sweepVar: string;
  sweepValue: number;
  algo: string;
  minRbMean: number;
  minRbCi95: number;
  qMinRbMean: number;
  qAllMean: number;
  qAllCi95: number;
  feasibleFrac: number;
  runs: number;
}

function parseNumber(raw: string, column: string, line: number): number {
  const value = Number(raw);
  if (raw.trim() === "" || Number.isNaN(value)) {
    throw new SchemaError(`line ${line}: column ${column} is not numeric: ${JSON.stringify(raw)}`);
  }
  return value;
}

/** Parse CSV text into rows; throws SchemaError with a column diagnostic. */
export function parseSweepCsv(text: string): SweepRow[] {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV: no header line");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const index = new Map<string, number>();
  header.forEach((name, i) => index.set(name, i));
  const missing = REQUIRED_COLUMNS.filter((c) => !index.has(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `missing columns: ${missing.join(", ")} (found: ${header.join(", ")})`,
    );
  }
  if (lines.length === 1) {
    throw new SchemaError("CSV has a header but no data rows");
  }
  const rows: SweepRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length < header.length) {
      throw new SchemaError(`line ${i + 1}: expected ${header.length} fields, got ${parts.length}`);
    }
    const cell = (name: string) => parts[index.get(name)!];
    rows.push({
      sweepVar: cell("sweep_var"),
      sweepValue: parseNumber(cell("sweep_value"), "sweep_value", i + 1),
      algo: cell("algo"),
      minRbMean: parseNumber(cell("min_rb_mean"), "min_rb_mean", i + 1),
      minRbCi95: parseNumber(cell("min_rb_ci95"), "min_rb_ci95", i + 1),
      qMinRbMean: parseNumber(cell("q_minrb_mean"), "q_minrb_mean", i + 1),
      qAllMean: parseNumber(cell("q_all_mean"), "q_all_mean", i + 1),
      qAllCi95: parseNumber(cell("q_all_ci95"), "q_all_ci95", i + 1),
      feasibleFrac: parseNumber(cell("feasible_frac"), "feasible_frac", i + 1),
      runs: parseNumber(cell("runs"), "runs", i + 1),
    });
  }
  return rows;
}

export interface Series {
  algo: string;
  /** x ascending, paired with values and half-widths of the error bars */
  x: number[];
  y: number[];
  ci: number[];
}

/** Group rows into per-algorithm series for one metric, x ascending. */
export function toSeries(
  rows: SweepRow[],
  metric: "min_rb" | "q_minrb" | "q_all",
): Series[] {
  const algos = [...new Set(rows.map((r) => r.algo))].sort();
  return algos.map((algo) => {
    const mine = rows
      .filter((r) => r.algo === algo)
      .sort((a, b) => a.sweepValue - b.sweepValue);
    const pick = (r: SweepRow): [number, number] => {
      switch (metric) {
        case "min_rb":
          return [r.minRbMean, r.minRbCi95];
        case "q_minrb":
          return [r.qMinRbMean, 0];
        case "q_all":
          return [r.qAllMean, r.qAllCi95];
      }
    };
    return {
      algo,
      x: mine.map((r) => r.sweepValue),
      y: mine.map((r) => pick(r)[0]),
      ci: mine.map((r) => pick(r)[1]),
    };
  });
}
