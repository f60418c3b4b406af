import * as fs from 'fs';
import * as path from 'path';

import { column, readCsv } from './csv.js';
import { cleanCurve, crossingDb, gapAtBer } from './curves.js';
import { PlotSpec, PlotSpecT } from './schema.js';
import { RenderGap, RenderSeries, pickStyle, renderSvg } from './svg.js';

export { readCsv, column } from './csv.js';
export { cleanCurve, crossingDb, gapAtBer } from './curves.js';
export { PlotSpec } from './schema.js';
export { renderSvg } from './svg.js';

export interface RenderResult {
  svg: string;
  gaps: RenderGap[];
}

/** Load curves per the spec, compute gap annotations, and produce the SVG. */
export function buildFigure(spec: PlotSpecT, baseDir = '.'): RenderResult {
  let simIndex = 0;
  const series: RenderSeries[] = spec.series.map((s, i) => {
    const table = readCsv(path.resolve(baseDir, s.csv));
    const x = column(table, s.xColumn, s.csv);
    const ber = column(table, s.column, s.csv);
    const curve = cleanCurve(x, ber);
    if (curve.x.length === 0) {
      throw new Error(`${s.csv}: series '${s.label}' has no plottable points`);
    }
    // colors follow the overall series order; markers cycle over sim series
    const style = pickStyle(i);
    const marker = pickStyle(s.kind === 'sim' ? simIndex++ : i).marker;
    let ci: number[] | undefined;
    if (s.kind === 'sim' && s.ciColumn) {
      const raw = column(table, s.ciColumn, s.csv);
      ci = curve.x.map((xv) => raw[x.indexOf(xv)]);
    }
    return {
      label: s.label,
      kind: s.kind,
      curve,
      ci,
      color: s.color ?? style.color,
      marker,
    };
  });

  const labels = new Set(series.map((s) => s.label));
  const gaps: RenderGap[] = spec.gapAnnotations.map((g) => {
    for (const name of [g.a, g.b]) {
      if (!labels.has(name)) {
        throw new Error(`gap annotation references unknown series '${name}'`);
      }
    }
    const a = series.find((s) => s.label === g.a)!;
    const b = series.find((s) => s.label === g.b)!;
    const gapDb = gapAtBer(a.curve, b.curve, g.atBer);
    if (!Number.isFinite(gapDb)) {
      throw new Error(
        `gap annotation '${g.a}' vs '${g.b}': a curve never reaches BER ${g.atBer}`,
      );
    }
    return { a: g.a, b: g.b, atBer: g.atBer, gapDb };
  });

  const svg = renderSvg(series, gaps, spec.title, spec.x.label, spec.y.label,
                        spec.x.min, spec.x.max, spec.y.min, spec.y.max);
  return { svg, gaps };
}

/** CLI entry: validate the spec file, render, write the SVG, print gaps. */
export function runPlotgen(specPath: string): number {
  let parsed: PlotSpecT;
  try {
    const raw = JSON.parse(fs.readFileSync(specPath, 'utf-8'));
    parsed = PlotSpec.parse(raw);
  } catch (err) {
    console.error(`plotgen: invalid spec: ${(err as Error).message}`);
    return 1;
  }
  try {
    const { svg, gaps } = buildFigure(parsed, path.dirname(specPath));
    const out = path.resolve(path.dirname(specPath), parsed.output);
    fs.mkdirSync(path.dirname(out), { recursive: true });
    fs.writeFileSync(out, svg);
    for (const g of gaps) {
      console.log(
        `gap '${g.a}' vs '${g.b}' at BER ${g.atBer}: ${g.gapDb.toFixed(2)} dB`,
      );
    }
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    console.error(`plotgen: ${(err as Error).message}`);
    return 1;
  }
}
