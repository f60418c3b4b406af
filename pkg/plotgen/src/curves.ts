/** A BER curve: x in dB, ber strictly positive where defined. */
export interface Curve {
  x: number[];
  ber: number[];
}

/** Drop non-finite and non-positive BER points (zero-error markers cannot
 *  live on a log axis). */
export function cleanCurve(x: number[], ber: number[]): Curve {
  const cx: number[] = [];
  const cb: number[] = [];
  for (let i = 0; i < x.length; i++) {
    if (Number.isFinite(x[i]) && Number.isFinite(ber[i]) && ber[i] > 0) {
      cx.push(x[i]);
      cb.push(ber[i]);
    }
  }
  return { x: cx, ber: cb };
}

/**
 * Eb/N0 at which the curve crosses `level`, by log-linear interpolation
 * between neighbouring points. NaN when the curve never reaches the level.
 */
export function crossingDb(curve: Curve, level: number): number {
  const t = Math.log10(level);
  const b = curve.ber.map(Math.log10);
  for (let i = 0; i < b.length - 1; i++) {
    if ((b[i] - t) * (b[i + 1] - t) <= 0 && b[i] !== b[i + 1]) {
      return curve.x[i] + ((curve.x[i + 1] - curve.x[i]) * (t - b[i])) / (b[i + 1] - b[i]);
    }
  }
  return NaN;
}

/** Horizontal dB gap between two curves at a target BER. */
export function gapAtBer(a: Curve, b: Curve, level: number): number {
  return Math.abs(crossingDb(a, level) - crossingDb(b, level));
}
