import { column, prefixedColumns, readCsv, requireColumns, stringColumn } from "./csv.js";
import { SchemaMismatch } from "./errors.js";
import { divergingColor, fmt, HEIGHT, linScale, logScale, PALETTE, Panel, render, WIDTH, } from "./svg.js";
function groupKeys(xs) {
    return xs[0].map((_, r) => xs.map((c) => fmt(c[r])).join(","));
}
function positive(values, what, path) {
    const out = values.filter((v) => v > 0 && Number.isFinite(v));
    if (out.length === 0)
        throw new SchemaMismatch(`${path}: no positive ${what} values`);
    return out;
}
/** Log-log survival curves over t with an optional reference-slope guide. */
export function survivalLoglog(spec, caption) {
    const t = readCsv(spec.inputs[0]);
    requireColumns(t, ["t", "p_hat", "se", "n"]);
    const xs = prefixedColumns(t, "x_");
    const ts = column(t, "t");
    const ps = column(t, "p_hat");
    const keys = groupKeys(xs);
    const panel = new Panel(0, 0, WIDTH, HEIGHT);
    const tPos = positive(ts, "t", t.path);
    const pPos = positive(ps, "p_hat", t.path);
    const sx = logScale(Math.min(...tPos), Math.max(...tPos), panel.plotLeft(), panel.plotRight());
    const sy = logScale(Math.min(...pPos), Math.max(...pPos) * 1.05, panel.plotBottom(), panel.plotTop());
    panel.title(spec.title ?? "survival probability");
    panel.axes(sx, sy, "t", "P(tau > t)");
    const uniq = [...new Set(keys)];
    uniq.forEach((key, gi) => {
        const color = PALETTE[gi % PALETTE.length];
        const rows = keys.map((k, i) => i).filter((i) => keys[i] === key && ps[i] > 0);
        rows.sort((a, b) => ts[a] - ts[b]);
        panel.polyline(rows.map((i) => sx(ts[i])), rows.map((i) => sy(ps[i])), color);
        for (const i of rows)
            panel.dot(sx(ts[i]), sy(ps[i]), color);
        panel.text(panel.plotRight() - 6, panel.plotTop() + 16 + 14 * gi, `x=(${key})`, 11, "end");
    });
    const slope = spec.overlay?.reference_slope;
    if (slope !== undefined) {
        const i0 = ps.findIndex((p) => p > 0);
        const tA = Math.min(...tPos), tB = Math.max(...tPos);
        const pA = ps[i0] * Math.pow(tA / ts[i0], -Math.abs(slope));
        const pB = ps[i0] * Math.pow(tB / ts[i0], -Math.abs(slope));
        panel.polyline([sx(tA), sx(tB)], [sy(pA), sy(pB)], "#555", "6 4");
        panel.text(sx(tB), sy(pB) - 6, `slope -${fmt(Math.abs(slope))}`, 11, "end");
    }
    return render([panel], WIDTH, HEIGHT, caption);
}
/** Dot-and-CI panel for exponent tables. */
export function exponentSummary(spec, caption) {
    const t = readCsv(spec.inputs[0]);
    requireColumns(t, ["target", "estimate", "ci_lo", "ci_hi", "n_points"]);
    const names = stringColumn(t, "target");
    const est = column(t, "estimate");
    const lo = column(t, "ci_lo");
    const hi = column(t, "ci_hi");
    const panel = new Panel(0, 0, WIDTH, HEIGHT);
    const vmin = Math.min(...lo, ...est);
    const vmax = Math.max(...hi, ...est);
    const sx = linScale(vmin - 0.05 * (vmax - vmin || 1), vmax + 0.05 * (vmax - vmin || 1), panel.plotLeft(), panel.plotRight());
    const sy = linScale(-0.5, names.length - 0.5, panel.plotTop(), panel.plotBottom());
    panel.title(spec.title ?? "exponent estimates");
    panel.axes(sx, sy, "estimate", "");
    names.forEach((name, i) => {
        const y = sy(i);
        panel.parts.push(`<line x1="${fmt(sx(lo[i]))}" y1="${fmt(y)}" x2="${fmt(sx(hi[i]))}" y2="${fmt(y)}" stroke="${PALETTE[0]}" stroke-width="2"/>`);
        panel.dot(sx(est[i]), y, PALETTE[1], 4);
        panel.text(panel.plotLeft() - 64, y + 4, name, 11);
    });
    const ref = spec.overlay?.reference_value;
    if (ref !== undefined) {
        panel.polyline([sx(ref), sx(ref)], [panel.plotTop(), panel.plotBottom()], "#555", "5 4");
        panel.text(sx(ref), panel.plotTop() - 4, `ref ${fmt(ref)}`, 10, "middle");
    }
    return render([panel], WIDTH, HEIGHT, caption);
}
/** Survival against the (1 ^ delta/t^(1/alpha))^beta profile on a half-space. */
export function halfspaceProfile(spec, caption) {
    const t = readCsv(spec.inputs[0]);
    requireColumns(t, ["t", "p_hat", "se", "n"]);
    const ov = spec.overlay ?? {};
    if (ov.alpha === undefined || ov.beta === undefined) {
        throw new SchemaMismatch("halfspace_profile needs overlay {alpha, beta}");
    }
    const xs = prefixedColumns(t, "x_");
    const axis = ov.axis ?? [...Array(xs.length - 1).fill(0), 1];
    if (axis.length !== xs.length) {
        throw new SchemaMismatch(`overlay.axis has ${axis.length} entries; survival table has d=${xs.length}`);
    }
    const ts = column(t, "t");
    const ps = column(t, "p_hat");
    const delta = xs[0].map((_, r) => xs.reduce((acc, c, j) => acc + c[r] * axis[j], 0));
    const u = delta.map((d, i) => d / Math.pow(ts[i], 1 / ov.alpha));
    const keep = u.map((v, i) => v > 0 && ps[i] > 0);
    const uPos = u.filter((_, i) => keep[i]);
    const pPos = ps.filter((_, i) => keep[i]);
    if (uPos.length === 0)
        throw new SchemaMismatch(`${t.path}: no usable profile points`);
    const panel = new Panel(0, 0, WIDTH, HEIGHT);
    const sx = logScale(Math.min(...uPos), Math.max(...uPos), panel.plotLeft(), panel.plotRight());
    const sy = logScale(Math.min(...pPos), Math.max(1, ...pPos) * 1.1, panel.plotBottom(), panel.plotTop());
    panel.title(spec.title ?? "half-space survival profile");
    panel.axes(sx, sy, "delta / t^(1/alpha)", "P(tau > t)");
    const order = uPos.map((_, i) => i).sort((a, b) => uPos[a] - uPos[b]);
    panel.polyline(order.map((i) => sx(uPos[i])), order.map((i) => sy(pPos[i])), PALETTE[0]);
    for (const i of order)
        panel.dot(sx(uPos[i]), sy(pPos[i]), PALETTE[0]);
    // reference curve C (1 ^ u)^beta with C matched in log space
    const logC = order.reduce((acc, i) => acc + Math.log(pPos[i]) - ov.beta * Math.log(Math.min(1, uPos[i])), 0) / order.length;
    const grid = [];
    const lo = Math.log(Math.min(...uPos)), hi = Math.log(Math.max(...uPos));
    for (let k = 0; k <= 64; k++)
        grid.push(Math.exp(lo + ((hi - lo) * k) / 64));
    panel.polyline(grid.map((v) => sx(v)), grid.map((v) => sy(Math.exp(logC) * Math.pow(Math.min(1, v), ov.beta))), "#555", "6 4");
    panel.text(panel.plotRight() - 6, panel.plotTop() + 16, `(1 ^ u)^${fmt(ov.beta)} guide`, 11, "end");
    return render([panel], WIDTH, HEIGHT, caption);
}
/** Heatmaps of the factorization ratio, one panel per t. */
export function ratioHeatmap(spec, caption) {
    const t = readCsv(spec.inputs[0]);
    requireColumns(t, ["t", "x_id", "y_id", "ratio"]);
    const ts = column(t, "t");
    const xid = column(t, "x_id");
    const yid = column(t, "y_id");
    const ratio = column(t, "ratio");
    const tvals = [...new Set(ts)].sort((a, b) => a - b);
    const nx = Math.max(...xid) + 1;
    const ny = Math.max(...yid) + 1;
    const med = [...ratio].sort((a, b) => a - b)[Math.floor(ratio.length / 2)];
    const panels = [];
    const pw = Math.max(320, Math.floor(WIDTH / tvals.length));
    tvals.forEach((tv, k) => {
        const panel = new Panel(k * pw, 0, pw, HEIGHT);
        panel.title(`t = ${fmt(tv)}`);
        const L = panel.plotLeft(), R = panel.plotRight(), T = panel.plotTop(), B = panel.plotBottom();
        const cw = (R - L) / nx, ch = (B - T) / ny;
        for (let i = 0; i < t.raw.length; i++) {
            if (ts[i] !== tv)
                continue;
            const v = Math.log(ratio[i] / med) / Math.log(4);
            panel.rect(L + xid[i] * cw, T + yid[i] * ch, cw, ch, divergingColor(v), "#fff");
            panel.text(L + xid[i] * cw + cw / 2, T + yid[i] * ch + ch / 2 + 4, fmt(Number(ratio[i].toPrecision(3))), 10, "middle");
        }
        panel.text((L + R) / 2, B + 24, "x index", 12, "middle");
        panel.text(panel.x0 + 16, (T + B) / 2, "y", 12, "middle");
        panels.push(panel);
    });
    return render(panels, pw * tvals.length, HEIGHT, caption);
}
/** Side-by-side histogram panels (one per input CSV), d = 1. */
export function yaglomPanel(spec, caption) {
    const tables = spec.inputs.map(readCsv);
    const pw = Math.max(320, Math.floor(WIDTH / tables.length));
    const panels = [];
    tables.forEach((t, k) => {
        requireColumns(t, ["bin_lo_1", "bin_hi_1", "mass"]);
        if (t.header.includes("bin_lo_2")) {
            throw new SchemaMismatch(`${t.path}: yaglom_panel renders d=1 histograms only`);
        }
        const lo = column(t, "bin_lo_1");
        const hi = column(t, "bin_hi_1");
        const mass = column(t, "mass");
        const finite = lo.map((v, i) => Number.isFinite(v) && Number.isFinite(hi[i]));
        const overflow = mass.filter((_, i) => !finite[i]).reduce((a, b) => a + b, 0);
        const panel = new Panel(k * pw, 0, pw, HEIGHT);
        const name = t.path.split("/").pop() ?? t.path;
        panel.title(name.replace(/\.csv$/, ""));
        const los = lo.filter((_, i) => finite[i]);
        const his = hi.filter((_, i) => finite[i]);
        const ms = mass.filter((_, i) => finite[i]);
        const widths = his.map((h, i) => h - los[i]);
        const dens = ms.map((m, i) => m / widths[i]);
        const sx = linScale(Math.min(...los), Math.max(...his), panel.plotLeft(), panel.plotRight());
        const sy = linScale(0, Math.max(...dens) * 1.08 || 1, panel.plotBottom(), panel.plotTop());
        panel.axes(sx, sy, "t^(-1/alpha) x", "density");
        dens.forEach((d, i) => {
            panel.rect(sx(los[i]), sy(d), sx(his[i]) - sx(los[i]), sy(0) - sy(d), PALETTE[k % PALETTE.length] + "99", "#fff");
        });
        panel.text(panel.plotRight() - 6, panel.plotTop() + 14, `overflow ${fmt(overflow)}`, 10, "end");
        panels.push(panel);
    });
    return render(panels, pw * tables.length, HEIGHT, caption);
}
export function renderFigure(spec, caption) {
    switch (spec.kind) {
        case "survival_loglog":
            return survivalLoglog(spec, caption);
        case "exponent_summary":
            return exponentSummary(spec, caption);
        case "halfspace_profile":
            return halfspaceProfile(spec, caption);
        case "ratio_heatmap":
            return ratioHeatmap(spec, caption);
        case "yaglom_panel":
            return yaglomPanel(spec, caption);
    }
}
