import * as fs from "node:fs";
import * as crypto from "node:crypto";
import { MissingFile, SchemaMismatch } from "./errors.js";

export const FIGURE_KINDS = [
  "survival_loglog",
  "exponent_summary",
  "halfspace_profile",
  "ratio_heatmap",
  "yaglom_panel",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface Overlay {
  reference_slope?: number;
  beta?: number;
  alpha?: number;
  axis?: number[];
  reference_value?: number;
}

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
  title?: string;
  overlay?: Overlay;
  /** Optional run manifest; its config_hash lands in the figure caption. */
  manifest?: string;
}

const KNOWN = new Set(["kind", "inputs", "output", "title", "overlay", "manifest"]);
const KNOWN_OVERLAY = new Set([
  "reference_slope", "beta", "alpha", "axis", "reference_value",
]);

export function loadSpec(path: string): FigureSpec {
  if (!fs.existsSync(path)) throw new MissingFile(path);
  let raw: unknown;
  try {
    raw = JSON.parse(fs.readFileSync(path, "utf8"));
  } catch (e) {
    throw new SchemaMismatch(`${path}: not valid JSON (${(e as Error).message})`);
  }
  return validateSpec(raw, path);
}

export function validateSpec(raw: unknown, source = "<spec>"): FigureSpec {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new SchemaMismatch(`${source}: spec must be a JSON object`);
  }
  const obj = raw as Record<string, unknown>;
  for (const k of Object.keys(obj)) {
    if (!KNOWN.has(k)) throw new SchemaMismatch(`${source}: unknown spec field '${k}'`);
  }
  const kind = obj.kind as FigureKind;
  if (!FIGURE_KINDS.includes(kind)) {
    throw new SchemaMismatch(
      `${source}: kind must be one of ${FIGURE_KINDS.join(", ")}, got '${String(obj.kind)}'`
    );
  }
  if (!Array.isArray(obj.inputs) || obj.inputs.length === 0 ||
      !obj.inputs.every((p) => typeof p === "string")) {
    throw new SchemaMismatch(`${source}: inputs must be a non-empty string array`);
  }
  if (typeof obj.output !== "string" || obj.output.length === 0) {
    throw new SchemaMismatch(`${source}: output must be a path`);
  }
  if (obj.overlay !== undefined) {
    const ov = obj.overlay as Record<string, unknown>;
    if (typeof ov !== "object" || ov === null) {
      throw new SchemaMismatch(`${source}: overlay must be an object`);
    }
    for (const k of Object.keys(ov)) {
      if (!KNOWN_OVERLAY.has(k)) {
        throw new SchemaMismatch(`${source}: unknown overlay field '${k}'`);
      }
    }
  }
  return obj as unknown as FigureSpec;
}

/** Caption string carrying the run manifest's config hash, when provided. */
export function provenanceCaption(spec: FigureSpec): string {
  if (!spec.manifest) return "";
  if (!fs.existsSync(spec.manifest)) throw new MissingFile(spec.manifest);
  let hash: string | undefined;
  try {
    const m = JSON.parse(fs.readFileSync(spec.manifest, "utf8"));
    hash = m.config_hash;
  } catch {
    throw new SchemaMismatch(`${spec.manifest}: not a manifest JSON`);
  }
  if (typeof hash !== "string") {
    throw new SchemaMismatch(`${spec.manifest}: missing config_hash`);
  }
  return `run ${hash.slice(0, 16)}`;
}

export function sha256(path: string): string {
  return crypto.createHash("sha256").update(fs.readFileSync(path)).digest("hex");
}
