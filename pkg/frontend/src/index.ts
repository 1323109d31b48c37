#!/usr/bin/env node
/** report --spec <figure-spec.json>: render one figure from experiment CSVs. */

import * as fs from "node:fs";
import * as path from "node:path";
import { MissingFile, SchemaMismatch } from "./errors.js";
import { renderFigure } from "./figures.js";
import { loadSpec, provenanceCaption, sha256 } from "./spec.js";

export function runReport(specPath: string): string {
  const spec = loadSpec(specPath);
  const before = spec.inputs.map((p) => (fs.existsSync(p) ? sha256(p) : ""));
  const caption = provenanceCaption(spec);
  const svg = renderFigure(spec, caption);
  // inputs are read-only: verify nothing was touched before writing output
  spec.inputs.forEach((p, i) => {
    if (sha256(p) !== before[i]) {
      throw new SchemaMismatch(`input modified during rendering: ${p}`);
    }
  });
  fs.mkdirSync(path.dirname(path.resolve(spec.output)), { recursive: true });
  fs.writeFileSync(spec.output, svg);
  return spec.output;
}

export function main(argv: string[]): number {
  const args = argv.slice(2);
  if (args.length !== 2 || args[0] !== "--spec") {
    process.stderr.write("usage: report --spec <figure-spec.json>\n");
    return 2;
  }
  try {
    const out = runReport(args[1]);
    process.stdout.write(`${out}\n`);
    return 0;
  } catch (e) {
    if (e instanceof SchemaMismatch || e instanceof MissingFile) {
      process.stderr.write(`${e.name}: ${e.message}\n`);
      return 2;
    }
    throw e;
  }
}

const entry = process.argv[1] ? path.resolve(process.argv[1]) : "";
if (entry === path.resolve(new URL(import.meta.url).pathname)) {
  process.exit(main(process.argv));
}
