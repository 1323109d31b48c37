import * as fs from "node:fs";
import { MissingFile, SchemaMismatch } from "./errors.js";

export interface Table {
  header: string[];
  raw: string[][];
  path: string;
}

/** Read a CSV (first line is the header); cells stay raw strings. */
export function readCsv(path: string): Table {
  if (!fs.existsSync(path)) throw new MissingFile(path);
  const text = fs.readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) throw new SchemaMismatch(`${path}: empty file`);
  const header = lines[0].split(",");
  const raw: string[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== header.length) {
      throw new SchemaMismatch(
        `${path}: row ${i} has ${parts.length} fields, header has ${header.length}`
      );
    }
    raw.push(parts);
  }
  return { header, raw, path };
}

function parseCell(path: string, name: string, cell: string): number {
  if (cell === "inf") return Infinity;
  if (cell === "-inf") return -Infinity;
  if (cell === "nan") return NaN;
  const v = Number(cell);
  if (cell.trim() === "" || Number.isNaN(v)) {
    throw new SchemaMismatch(`${path}: non-numeric value '${cell}' in column '${name}'`);
  }
  return v;
}

export function column(t: Table, name: string): number[] {
  const i = t.header.indexOf(name);
  if (i < 0) throw new SchemaMismatch(`${t.path}: missing column '${name}'`);
  return t.raw.map((r) => parseCell(t.path, name, r[i]));
}

export function stringColumn(t: Table, name: string): string[] {
  const i = t.header.indexOf(name);
  if (i < 0) throw new SchemaMismatch(`${t.path}: missing column '${name}'`);
  return t.raw.map((r) => r[i]);
}

/** Columns named `${prefix}1..d` as an array of d numeric columns. */
export function prefixedColumns(t: Table, prefix: string): number[][] {
  const names: string[] = [];
  for (let i = 1; ; i++) {
    const name = `${prefix}${i}`;
    if (!t.header.includes(name)) break;
    names.push(name);
  }
  if (names.length === 0) {
    throw new SchemaMismatch(`${t.path}: no '${prefix}*' columns`);
  }
  return names.map((n) => column(t, n));
}

export function requireColumns(t: Table, names: string[]): void {
  for (const n of names) {
    if (!t.header.includes(n)) {
      throw new SchemaMismatch(
        `${t.path}: expected columns ${JSON.stringify(names)}, got ${JSON.stringify(t.header)}`
      );
    }
  }
  if (t.raw.length === 0) {
    throw new SchemaMismatch(`${t.path}: no data rows`);
  }
}
