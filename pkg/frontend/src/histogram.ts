/** Fixed-width diameter histogram, 50 um bins over [0, max diameter].
 *
 * The bin width matches the size classes of standard control cards, so a
 * control card reads as one spike per class. Only the binning lives here;
 * the diameters themselves always come from the server report.
 */

export const BIN_WIDTH_UM = 50;

export interface HistogramBin {
  lo: number; // inclusive
  hi: number; // exclusive
  count: number;
}

export function diameterHistogram(
  diameters: readonly number[],
  binWidth: number = BIN_WIDTH_UM,
): HistogramBin[] {
  if (!Number.isFinite(binWidth) || binWidth <= 0) {
    throw new RangeError(`bin width must be a positive number, got ${binWidth}`);
  }
  if (diameters.length === 0) return [];
  let max = 0;
  for (const d of diameters) {
    if (!Number.isFinite(d) || d < 0) {
      throw new RangeError(`diameters must be finite and non-negative, got ${d}`);
    }
    if (d > max) max = d;
  }
  const n = Math.floor(max / binWidth) + 1;
  const bins: HistogramBin[] = Array.from({ length: n }, (_, k) => ({
    lo: k * binWidth,
    hi: (k + 1) * binWidth,
    count: 0,
  }));
  for (const d of diameters) {
    bins[Math.min(Math.floor(d / binWidth), n - 1)].count += 1;
  }
  return bins;
}
