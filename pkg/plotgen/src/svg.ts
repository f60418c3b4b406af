import { Curve, crossingDb } from './curves.js';

export interface RenderSeries {
  label: string;
  kind: 'theory' | 'sim';
  curve: Curve;
  /** half-width of the 95% interval per point, aligned with curve.x */
  ci?: number[];
  color: string;
  marker: string;
}

export interface RenderGap {
  a: string;
  b: string;
  atBer: number;
  gapDb: number;
}

const WIDTH = 760;
const HEIGHT = 540;
const M = { left: 72, right: 24, top: 42, bottom: 58 };

export const PALETTE = ['#1f6eb4', '#d1342b', '#2d8a42', '#8447ad', '#b07a1e', '#2b8a8a'];
const MARKERS = ['circle', 'square', 'diamond', 'triangle'];

export function pickStyle(i: number): { color: string; marker: string } {
  return { color: PALETTE[i % PALETTE.length], marker: MARKERS[i % MARKERS.length] };
}

function fmt(v: number): string {
  return v.toFixed(2).replace(/-0\.00/, '0.00');
}

interface Scales {
  sx: (db: number) => number;
  sy: (ber: number) => number;
  x0: number;
  x1: number;
  yExp0: number;
  yExp1: number;
}

function buildScales(series: RenderSeries[], xMin?: number, xMax?: number,
                     yMin?: number, yMax?: number): Scales {
  const xs = series.flatMap((s) => s.curve.x);
  const bers = series.flatMap((s) => s.curve.ber);
  if (xs.length === 0) throw new Error('no plottable points in any series');
  const x0 = xMin ?? Math.floor(Math.min(...xs));
  const x1 = xMax ?? Math.ceil(Math.max(...xs));
  const yExp0 = Math.log10(yMax ?? 10 ** Math.ceil(Math.log10(Math.max(...bers))));
  const yExp1 = Math.log10(yMin ?? 10 ** Math.floor(Math.log10(Math.min(...bers))));
  const plotW = WIDTH - M.left - M.right;
  const plotH = HEIGHT - M.top - M.bottom;
  return {
    sx: (db) => M.left + ((db - x0) / (x1 - x0)) * plotW,
    sy: (ber) => M.top + ((yExp0 - Math.log10(ber)) / (yExp0 - yExp1)) * plotH,
    x0, x1, yExp0, yExp1,
  };
}

function markerShape(kind: string, x: number, y: number, color: string): string {
  const r = 4;
  switch (kind) {
    case 'square':
      return `<rect x="${fmt(x - r)}" y="${fmt(y - r)}" width="${2 * r}" height="${2 * r}" fill="none" stroke="${color}" stroke-width="1.5"/>`;
    case 'diamond':
      return `<path d="M ${fmt(x)} ${fmt(y - r - 1)} L ${fmt(x + r + 1)} ${fmt(y)} L ${fmt(x)} ${fmt(y + r + 1)} L ${fmt(x - r - 1)} ${fmt(y)} Z" fill="none" stroke="${color}" stroke-width="1.5"/>`;
    case 'triangle':
      return `<path d="M ${fmt(x)} ${fmt(y - r - 1)} L ${fmt(x + r)} ${fmt(y + r)} L ${fmt(x - r)} ${fmt(y + r)} Z" fill="none" stroke="${color}" stroke-width="1.5"/>`;
    default:
      return `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" fill="none" stroke="${color}" stroke-width="1.5"/>`;
  }
}

/** Render a log-y BER figure: theory as lines, simulation as markers with
 *  CI whiskers, plus optional horizontal gap annotations. Pure function of
 *  its inputs — no timestamps, no randomness. */
export function renderSvg(series: RenderSeries[], gaps: RenderGap[],
                          title: string, xLabel: string, yLabel: string,
                          xMin?: number, xMax?: number,
                          yMin?: number, yMax?: number): string {
  const sc = buildScales(series, xMin, xMax, yMin, yMax);
  const plotBottom = HEIGHT - M.bottom;
  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  if (title) {
    parts.push(`<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="15">${title}</text>`);
  }

  // frame and grid
  parts.push(`<rect x="${M.left}" y="${M.top}" width="${WIDTH - M.left - M.right}" height="${HEIGHT - M.top - M.bottom}" fill="none" stroke="#333" stroke-width="1"/>`);
  const xStep = sc.x1 - sc.x0 > 30 ? 5 : 2;
  for (let db = Math.ceil(sc.x0 / xStep) * xStep; db <= sc.x1; db += xStep) {
    const px = sc.sx(db);
    parts.push(`<line x1="${fmt(px)}" y1="${M.top}" x2="${fmt(px)}" y2="${plotBottom}" stroke="#ddd" stroke-width="0.5"/>`);
    parts.push(`<text x="${fmt(px)}" y="${plotBottom + 18}" text-anchor="middle" font-size="12">${db}</text>`);
  }
  for (let e = Math.ceil(sc.yExp1); e <= Math.floor(sc.yExp0); e++) {
    const py = sc.sy(10 ** e);
    parts.push(`<line x1="${M.left}" y1="${fmt(py)}" x2="${WIDTH - M.right}" y2="${fmt(py)}" stroke="#ddd" stroke-width="0.5"/>`);
    parts.push(`<text x="${M.left - 8}" y="${fmt(py + 4)}" text-anchor="end" font-size="12">1e${e}</text>`);
  }
  parts.push(`<text x="${(M.left + WIDTH - M.right) / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-size="13">${xLabel}</text>`);
  parts.push(`<text x="20" y="${(M.top + plotBottom) / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 20 ${(M.top + plotBottom) / 2})">${yLabel}</text>`);

  // series
  for (const s of series) {
    const pts = s.curve.x.map((x, i) => [sc.sx(x), sc.sy(s.curve.ber[i])]);
    if (s.kind === 'theory') {
      const d = pts.map(([x, y], i) => `${i === 0 ? 'M' : 'L'} ${fmt(x)} ${fmt(y)}`).join(' ');
      parts.push(`<path class="theory" d="${d}" fill="none" stroke="${s.color}" stroke-width="1.8"/>`);
    } else {
      for (let i = 0; i < pts.length; i++) {
        const [px, py] = pts[i];
        if (s.ci && Number.isFinite(s.ci[i]) && s.ci[i] > 0) {
          const hi = sc.sy(s.curve.ber[i] + s.ci[i]);
          const loBer = s.curve.ber[i] - s.ci[i];
          const lo = loBer > 0 ? sc.sy(loBer) : plotBottom;
          parts.push(`<line x1="${fmt(px)}" y1="${fmt(Math.max(hi, M.top))}" x2="${fmt(px)}" y2="${fmt(Math.min(lo, plotBottom))}" stroke="${s.color}" stroke-width="1"/>`);
        }
        parts.push(markerShape(s.marker, px, py, s.color));
      }
    }
  }

  // gap annotations: horizontal double-headed segment at the target BER
  for (const g of gaps) {
    const sa = series.find((s) => s.label === g.a)!;
    const sb = series.find((s) => s.label === g.b)!;
    const xa = crossingDb(sa.curve, g.atBer);
    const xb = crossingDb(sb.curve, g.atBer);
    const py = sc.sy(g.atBer);
    const p1 = sc.sx(Math.min(xa, xb));
    const p2 = sc.sx(Math.max(xa, xb));
    parts.push(`<line x1="${fmt(p1)}" y1="${fmt(py)}" x2="${fmt(p2)}" y2="${fmt(py)}" stroke="#111" stroke-width="1.2" marker-start="url(#arrow)" marker-end="url(#arrow)"/>`);
    parts.push(`<text x="${fmt((p1 + p2) / 2)}" y="${fmt(py - 6)}" text-anchor="middle" font-size="12">gap = ${g.gapDb.toFixed(2)} dB</text>`);
  }
  if (gaps.length > 0) {
    parts.push('<defs><marker id="arrow" viewBox="0 0 8 8" refX="4" refY="4" markerWidth="6" markerHeight="6" orient="auto-start-reverse"><path d="M 0 0 L 8 4 L 0 8 z" fill="#111"/></marker></defs>');
  }

  // legend
  const lx = WIDTH - M.right - 220;
  let ly = M.top + 14;
  for (const s of series) {
    if (s.kind === 'theory') {
      parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 26}" y2="${ly - 4}" stroke="${s.color}" stroke-width="1.8"/>`);
    } else {
      parts.push(markerShape(s.marker, lx + 13, ly - 4, s.color));
    }
    parts.push(`<text x="${lx + 32}" y="${ly}" font-size="12">${s.label}</text>`);
    ly += 18;
  }

  parts.push('</svg>');
  return parts.join('\n');
}
