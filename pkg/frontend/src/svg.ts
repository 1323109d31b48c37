/** Minimal deterministic SVG scene builder: no timestamps, fixed styles. */

export const WIDTH = 760;
export const HEIGHT = 520;
const MARGIN = { top: 48, right: 24, bottom: 56, left: 72 };

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return String(x);
  if (x === 0) return "0";
  const a = Math.abs(x);
  if (a >= 1e5 || a < 1e-4) return x.toExponential(3);
  return Number(x.toPrecision(6)).toString();
}

export interface Scale {
  (v: number): number;
  ticks: number[];
  label: (v: number) => string;
}

function linearTicks(lo: number, hi: number, n = 6): number[] {
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = span / n / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * mult;
  const out: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) out.push(v);
  return out;
}

export function linScale(lo: number, hi: number, rLo: number, rHi: number): Scale {
  if (hi === lo) { lo -= 1; hi += 1; }
  const f = ((v: number) => rLo + ((v - lo) / (hi - lo)) * (rHi - rLo)) as Scale;
  f.ticks = linearTicks(lo, hi);
  f.label = fmt;
  return f;
}

export function logScale(lo: number, hi: number, rLo: number, rHi: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const f = ((v: number) => rLo + ((Math.log10(v) - llo) / (lhi - llo || 1)) * (rHi - rLo)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.ceil(llo - 1e-9); e <= Math.floor(lhi + 1e-9); e++) ticks.push(Math.pow(10, e));
  if (ticks.length < 2) {
    f.ticks = linearTicks(lo, hi, 4);
  } else {
    f.ticks = ticks;
  }
  f.label = (v) => fmt(v);
  return f;
}

export class Panel {
  parts: string[] = [];
  constructor(
    public x0: number, public y0: number,
    public w: number, public h: number,
  ) {}

  plotLeft(): number { return this.x0 + MARGIN.left; }
  plotRight(): number { return this.x0 + this.w - MARGIN.right; }
  plotTop(): number { return this.y0 + MARGIN.top; }
  plotBottom(): number { return this.y0 + this.h - MARGIN.bottom; }

  axes(xs: Scale, ys: Scale, xlabel: string, ylabel: string): void {
    const L = this.plotLeft(), R = this.plotRight(), T = this.plotTop(), B = this.plotBottom();
    this.parts.push(`<rect x="${L}" y="${T}" width="${R - L}" height="${B - T}" fill="none" stroke="#333"/>`);
    for (const t of xs.ticks) {
      const px = xs(t);
      if (px < L - 0.5 || px > R + 0.5) continue;
      this.parts.push(`<line x1="${fmt(px)}" y1="${B}" x2="${fmt(px)}" y2="${B + 5}" stroke="#333"/>`);
      this.parts.push(`<text x="${fmt(px)}" y="${B + 20}" font-size="11" text-anchor="middle">${xs.label(t)}</text>`);
    }
    for (const t of ys.ticks) {
      const py = ys(t);
      if (py < T - 0.5 || py > B + 0.5) continue;
      this.parts.push(`<line x1="${L - 5}" y1="${fmt(py)}" x2="${L}" y2="${fmt(py)}" stroke="#333"/>`);
      this.parts.push(`<text x="${L - 8}" y="${fmt(py + 4)}" font-size="11" text-anchor="end">${ys.label(t)}</text>`);
    }
    this.parts.push(`<text x="${fmt((L + R) / 2)}" y="${B + 40}" font-size="13" text-anchor="middle">${escapeXml(xlabel)}</text>`);
    this.parts.push(`<text x="${this.x0 + 18}" y="${fmt((T + B) / 2)}" font-size="13" text-anchor="middle" transform="rotate(-90 ${this.x0 + 18} ${fmt((T + B) / 2)})">${escapeXml(ylabel)}</text>`);
  }

  title(text: string): void {
    this.parts.push(`<text x="${fmt(this.x0 + this.w / 2)}" y="${this.y0 + 22}" font-size="15" text-anchor="middle" font-weight="bold">${escapeXml(text)}</text>`);
  }

  polyline(px: number[], py: number[], color: string, dash = ""): void {
    const pts = px.map((x, i) => `${fmt(x)},${fmt(py[i])}`).join(" ");
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(`<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.6"${d}/>`);
  }

  dot(px: number, py: number, color: string, r = 3): void {
    this.parts.push(`<circle cx="${fmt(px)}" cy="${fmt(py)}" r="${r}" fill="${color}"/>`);
  }

  errorBarV(px: number, pyLo: number, pyHi: number, color: string): void {
    this.parts.push(`<line x1="${fmt(px)}" y1="${fmt(pyLo)}" x2="${fmt(px)}" y2="${fmt(pyHi)}" stroke="${color}" stroke-width="1.2"/>`);
  }

  rect(px: number, py: number, w: number, h: number, fill: string, stroke = "none"): void {
    this.parts.push(`<rect x="${fmt(px)}" y="${fmt(py)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}" stroke="${stroke}"/>`);
  }

  text(px: number, py: number, s: string, size = 11, anchor = "start"): void {
    this.parts.push(`<text x="${fmt(px)}" y="${fmt(py)}" font-size="${size}" text-anchor="${anchor}">${escapeXml(s)}</text>`);
  }
}

export function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function render(panels: Panel[], width: number, height: number, caption: string): string {
  const body = panels.map((p) => p.parts.join("\n")).join("\n");
  const cap = caption
    ? `<text x="8" y="${height - 8}" font-size="10" fill="#666">${escapeXml(caption)}</text>`
    : "";
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    body,
    cap,
    `</svg>`,
  ].join("\n");
}

/** Two-color diverging map for log-ratios in [-1, 1]. */
export function divergingColor(v: number): string {
  const t = Math.max(-1, Math.min(1, v));
  const mix = (a: number, b: number, u: number) => Math.round(a + (b - a) * u);
  if (t < 0) {
    const u = 1 + t;
    return `rgb(${mix(33, 247, u)},${mix(102, 247, u)},${mix(172, 247, u)})`;
  }
  const u = t;
  return `rgb(${mix(247, 178, u)},${mix(247, 24, u)},${mix(247, 43, u)})`;
}
