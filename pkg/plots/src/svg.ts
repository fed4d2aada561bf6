/** Deterministic SVG assembly: fixed canvas, fixed palette, no timestamps.
 *
 * Every coordinate is rounded to two decimals so that identical inputs
 * always serialize to identical bytes.
 */

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { top: 40, right: 30, bottom: 58, left: 78 };

export const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
export const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

/** Series colors, assigned by sorted scheme name for reproducibility. */
export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

const fmt = (v: number): string => {
  const r = v.toFixed(2);
  return r === "-0.00" ? "0.00" : r;
};

export interface Scale {
  (v: number): number;
  ticks: number[];
}

export function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  if (hi === lo) {
    hi = lo + 1;
  }
  const f = ((v: number) => outLo + ((v - lo) / (hi - lo)) * (outHi - outLo)) as Scale;
  f.ticks = linearTicks(lo, hi);
  return f;
}

export function logScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const safeLo = Math.max(lo, 1e-9);
  const safeHi = Math.max(hi, safeLo * 10);
  const llo = Math.log10(safeLo);
  const lhi = Math.log10(safeHi);
  const f = ((v: number) =>
    outLo + ((Math.log10(Math.max(v, safeLo)) - llo) / (lhi - llo)) * (outHi - outLo)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.floor(llo); e <= Math.ceil(lhi); e += 1) {
    const t = 10 ** e;
    if (t >= safeLo * 0.999 && t <= safeHi * 1.001) {
      ticks.push(t);
    }
  }
  f.ticks = ticks.length >= 2 ? ticks : [safeLo, safeHi];
  return f;
}

function linearTicks(lo: number, hi: number, count = 6): number[] {
  const span = hi - lo;
  const step = 10 ** Math.floor(Math.log10(span / count));
  const err = span / count / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * mult;
  const start = Math.ceil(lo / s) * s;
  const ticks: number[] = [];
  for (let v = start; v <= hi + s * 1e-9; v += s) {
    ticks.push(Math.abs(v) < s * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function tickLabel(v: number): string {
  if (v === 0) {
    return "0";
  }
  const a = Math.abs(v);
  if (a >= 1e6) {
    return `${trimZeros((v / 1e6).toFixed(2))}M`;
  }
  if (a >= 1e3) {
    return `${trimZeros((v / 1e3).toFixed(1))}k`;
  }
  if (a < 0.01) {
    return v.toExponential(0);
  }
  return trimZeros(v.toFixed(2));
}

function trimZeros(s: string): string {
  return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
}

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export class SvgDoc {
  private parts: string[] = [];

  add(part: string): void {
    this.parts.push(part);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1, dash = ""): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.add(`<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
      `stroke="${stroke}" stroke-width="${width}"${d}/>`);
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 2): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.add(`<polyline points="${pts}" fill="none" stroke="${stroke}" ` +
      `stroke-width="${width}" stroke-linejoin="round"/>`);
  }

  polygon(points: Array<[number, number]>, fill: string, opacity: number): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.add(`<polygon points="${pts}" fill="${fill}" opacity="${fmt(opacity)}"/>`);
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.add(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${fmt(r)}" fill="${fill}"/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.add(`<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`);
  }

  text(x: number, y: number, content: string, opts: { size?: number; anchor?: string; rotate?: boolean; bold?: boolean } = {}): void {
    const size = opts.size ?? 13;
    const anchor = opts.anchor ?? "middle";
    const rot = opts.rotate ? ` transform="rotate(-90 ${fmt(x)} ${fmt(y)})"` : "";
    const weight = opts.bold ? ` font-weight="bold"` : "";
    this.add(`<text x="${fmt(x)}" y="${fmt(y)}" font-family="Helvetica,Arial,sans-serif" ` +
      `font-size="${size}" text-anchor="${anchor}"${weight}${rot}>${esc(content)}</text>`);
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      ...this.parts,
      "</svg>",
      "",
    ].join("\n");
  }
}

export interface AxisOptions {
  xLabel: string;
  yLabel: string;
  title: string;
}

/** Draw frame, ticks, grid lines, and labels for a prepared pair of scales. */
export function drawAxes(doc: SvgDoc, xs: Scale, ys: Scale, opts: AxisOptions): void {
  const x0 = MARGIN.left;
  const x1 = MARGIN.left + PLOT_W;
  const y0 = MARGIN.top + PLOT_H;
  const y1 = MARGIN.top;
  for (const t of ys.ticks) {
    const y = ys(t);
    doc.line(x0, y, x1, y, "#dddddd");
    doc.text(x0 - 8, y + 4, tickLabel(t), { anchor: "end", size: 12 });
  }
  for (const t of xs.ticks) {
    const x = xs(t);
    doc.line(x, y0, x, y0 + 5, "#333333");
    doc.text(x, y0 + 20, tickLabel(t), { size: 12 });
  }
  doc.line(x0, y0, x1, y0, "#333333", 1.5);
  doc.line(x0, y0, x0, y1, "#333333", 1.5);
  doc.text((x0 + x1) / 2, HEIGHT - 14, opts.xLabel);
  doc.text(22, (y0 + y1) / 2, opts.yLabel, { rotate: true });
  doc.text((x0 + x1) / 2, 22, opts.title, { bold: true, size: 15 });
}

export function drawLegend(doc: SvgDoc, names: string[], colors: Map<string, string>): void {
  let x = MARGIN.left + 12;
  const y = MARGIN.top + 16;
  for (const name of names) {
    const color = colors.get(name) ?? "#000000";
    doc.rect(x, y - 9, 18, 4, color);
    doc.text(x + 24, y - 2, name, { anchor: "start", size: 12 });
    x += 24 + 8 * name.length + 28;
  }
}

export function schemeColors(schemes: string[]): Map<string, string> {
  const sorted = [...schemes].sort();
  return new Map(sorted.map((s, i) => [s, PALETTE[i % PALETTE.length]]));
}
