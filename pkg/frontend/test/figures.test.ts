import assert from "node:assert/strict";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { test } from "node:test";
import { fileURLToPath } from "node:url";

import { MissingFile, SchemaMismatch } from "../src/errors.js";
import { renderFigure } from "../src/figures.js";
import { FigureSpec, loadSpec, validateSpec } from "../src/spec.js";
import { runReport } from "../src/index.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const FIX = path.join(here, "..", "..", "test", "fixtures");

function fixture(name: string): string {
  return path.join(FIX, name);
}

function tmpdir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "report-"));
}

function writeSpec(dir: string, spec: FigureSpec): string {
  const p = path.join(dir, "spec.json");
  fs.writeFileSync(p, JSON.stringify(spec));
  return p;
}

const ALL_KINDS: FigureSpec[] = [
  {
    kind: "survival_loglog",
    inputs: [fixture("survival.csv")],
    output: "",
    overlay: { reference_slope: 0.5 },
    manifest: fixture("manifest.json"),
  },
  {
    kind: "exponent_summary",
    inputs: [fixture("exponent.csv")],
    output: "",
    overlay: { reference_value: 0.5 },
  },
  {
    kind: "halfspace_profile",
    inputs: [fixture("profile_survival.csv")],
    output: "",
    overlay: { alpha: 1.5, beta: 0.75, axis: [1] },
  },
  { kind: "ratio_heatmap", inputs: [fixture("ratio.csv")], output: "" },
  {
    kind: "yaglom_panel",
    inputs: [fixture("hist_t8.csv"), fixture("hist_t16.csv")],
    output: "",
  },
];

test("all five figure kinds render via the CLI path and leave inputs untouched", () => {
  const dir = tmpdir();
  for (const base of ALL_KINDS) {
    const spec = { ...base, output: path.join(dir, `${base.kind}.svg`) };
    const before = spec.inputs.map((p) => fs.readFileSync(p));
    const out = runReport(writeSpec(dir, spec));
    const svg = fs.readFileSync(out, "utf8");
    assert.ok(svg.startsWith("<svg"), `${base.kind}: not an svg`);
    assert.ok(svg.includes("</svg>"));
    spec.inputs.forEach((p, i) => {
      assert.deepEqual(fs.readFileSync(p), before[i], `${p} was modified`);
    });
  }
});

test("rendering is deterministic byte-for-byte", () => {
  const dir = tmpdir();
  const spec = { ...ALL_KINDS[0], output: path.join(dir, "a.svg") };
  const a = fs.readFileSync(runReport(writeSpec(dir, spec)));
  const spec2 = { ...ALL_KINDS[0], output: path.join(dir, "b.svg") };
  const b = fs.readFileSync(runReport(writeSpec(dir, spec2)));
  assert.deepEqual(a, b);
});

test("manifest hash lands in the caption", () => {
  const dir = tmpdir();
  const spec = { ...ALL_KINDS[0], output: path.join(dir, "c.svg") };
  const svg = fs.readFileSync(runReport(writeSpec(dir, spec)), "utf8");
  assert.ok(svg.includes("run 0123456789abcdef"));
});

test("reference slope overlay is drawn", () => {
  const dir = tmpdir();
  const spec = { ...ALL_KINDS[0], output: path.join(dir, "d.svg") };
  const svg = fs.readFileSync(runReport(writeSpec(dir, spec)), "utf8");
  assert.ok(svg.includes("slope -0.5"));
});

test("empty-grid CSV raises SchemaMismatch", () => {
  const spec: FigureSpec = {
    kind: "survival_loglog",
    inputs: [fixture("empty.csv")],
    output: "/tmp/never.svg",
  };
  assert.throws(() => renderFigure(spec, ""), SchemaMismatch);
});

test("missing input raises MissingFile", () => {
  const spec: FigureSpec = {
    kind: "survival_loglog",
    inputs: [fixture("nope.csv")],
    output: "/tmp/never.svg",
  };
  assert.throws(() => renderFigure(spec, ""), MissingFile);
});

test("schema mismatch on wrong columns", () => {
  const spec: FigureSpec = {
    kind: "ratio_heatmap",
    inputs: [fixture("survival.csv")],
    output: "/tmp/never.svg",
  };
  assert.throws(() => renderFigure(spec, ""), SchemaMismatch);
});

test("spec validation rejects unknown fields and kinds", () => {
  assert.throws(
    () => validateSpec({ kind: "survival_loglog", inputs: ["x"], output: "y", nope: 1 }),
    SchemaMismatch,
  );
  assert.throws(
    () => validateSpec({ kind: "pie", inputs: ["x"], output: "y" }),
    SchemaMismatch,
  );
  assert.throws(() => loadSpec("/tmp/definitely-not-here.json"), MissingFile);
});

test("profile needs alpha and beta overlay", () => {
  const spec: FigureSpec = {
    kind: "halfspace_profile",
    inputs: [fixture("profile_survival.csv")],
    output: "/tmp/never.svg",
  };
  assert.throws(() => renderFigure(spec, ""), SchemaMismatch);
});
