#!/usr/bin/env node
/** plotkit CLI: `plot --csv FILE --out DIR --format svg`; exits 0/1/2. */

import { SchemaError } from "./csv.js";
import { render } from "./render.js";

const EXIT_OK = 0;
const EXIT_SCHEMA = 1;
const EXIT_IO = 2;

function usage(): string {
  return "usage: plotkit plot --csv FILE --out DIR [--format svg]";
}

export function main(argv: string[]): number {
  if (argv[0] !== "plot") {
    process.stderr.write(usage() + "\n");
    return EXIT_SCHEMA;
  }
  const opts = new Map<string, string>();
  for (let i = 1; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      process.stderr.write(usage() + "\n");
      return EXIT_SCHEMA;
    }
    opts.set(key.slice(2), value);
  }
  const csv = opts.get("csv");
  const out = opts.get("out");
  const format = opts.get("format") ?? "svg";
  if (!csv || !out) {
    process.stderr.write(usage() + "\n");
    return EXIT_SCHEMA;
  }
  try {
    const result = render({ csvPath: csv, outDir: out, format: format as "svg" });
    for (const file of result.files) {
      process.stdout.write(file + "\n");
    }
    return EXIT_OK;
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`schema error: ${err.message}\n`);
      return EXIT_SCHEMA;
    }
    process.stderr.write(`io error: ${String(err)}\n`);
    return EXIT_IO;
  }
}

process.exit(main(process.argv.slice(2)));
