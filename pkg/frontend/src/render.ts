/** DOM rendering for the results pane. Pure presentation: every value is
 * lifted from the server report as-is.
 */

import type { Report } from "./api.js";
import { diameterHistogram } from "./histogram.js";

export function fmt(value: number | null | undefined, digits = 2): string {
  if (value === null || value === undefined) return "n/a";
  const rounded = value.toFixed(digits);
  // drop trailing zeros so "4.00" reads as "4" but "4.36" survives
  return String(Number(rounded));
}

interface SummaryRow {
  label: string;
  value: (report: Report) => string;
}

export const SUMMARY_ROWS: SummaryRow[] = [
  { label: "drops", value: (r) => String(r.summary.drop_count) },
  { label: "density (drops/cm²)", value: (r) => fmt(r.summary.density_per_cm2) },
  { label: "coverage (%)", value: (r) => fmt(r.summary.coverage_pct) },
  { label: "VMD (µm)", value: (r) => fmt(r.summary.vmd_um, 1) },
  { label: "Dv0.1 (µm)", value: (r) => fmt(r.summary.dv01_um, 1) },
  { label: "Dv0.9 (µm)", value: (r) => fmt(r.summary.dv09_um, 1) },
  { label: "relative span", value: (r) => fmt(r.summary.relative_span, 3) },
  { label: "mean drop area (µm²)", value: (r) => fmt(r.summary.mean_area_um2, 0) },
  { label: "fractal dimension", value: (r) => (r.fractal ? fmt(r.fractal.dimension, 3) : "n/a") },
];

export function renderSummary(tbody: HTMLElement, report: Report): void {
  tbody.textContent = "";
  for (const row of SUMMARY_ROWS) {
    const tr = tbody.ownerDocument.createElement("tr");
    const th = tbody.ownerDocument.createElement("th");
    th.textContent = row.label;
    const td = tbody.ownerDocument.createElement("td");
    td.textContent = row.value(report);
    tr.append(th, td);
    tbody.appendChild(tr);
  }
}

/** The banner is visible exactly when the report's warning level is
 * questionable or unfeasible. */
export function renderBanner(el: HTMLElement, report: Report | null): void {
  const level = report?.warning.level ?? "none";
  if (level === "none") {
    el.hidden = true;
    el.textContent = "";
    el.className = "banner";
    return;
  }
  el.hidden = false;
  el.className = `banner banner-${level}`;
  const coverage = fmt(report!.warning.coverage_pct, 1);
  el.textContent =
    level === "unfeasible"
      ? `Coverage ${coverage}% is above 70%: drops are fused, analysis is unfeasible.`
      : `Coverage ${coverage}% is above 20%: drop separation is questionable.`;
}

export function renderHistogram(container: HTMLElement, report: Report): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  const bins = diameterHistogram(report.drops.map((d) => d.diameter_um));
  if (bins.length === 0) {
    const empty = doc.createElement("p");
    empty.className = "histogram-empty";
    empty.textContent = "no drops detected";
    container.appendChild(empty);
    return;
  }
  const peak = Math.max(...bins.map((b) => b.count));
  for (const bin of bins) {
    const bar = doc.createElement("div");
    bar.className = "histogram-bar";
    bar.style.height = `${(100 * bin.count) / peak}%`;
    bar.title = `${bin.lo}-${bin.hi} µm: ${bin.count}`;
    bar.dataset.count = String(bin.count);
    container.appendChild(bar);
  }
}

export function renderDrops(tbody: HTMLElement, report: Report): void {
  const doc = tbody.ownerDocument;
  tbody.textContent = "";
  for (const drop of report.drops) {
    const tr = doc.createElement("tr");
    for (const cell of [
      String(drop.id),
      fmt(drop.diameter_um, 1),
      fmt(drop.corrected_diameter_um, 1),
      fmt(drop.area_um2, 0),
      String(drop.pixel_area),
    ]) {
      const td = doc.createElement("td");
      td.textContent = cell;
      tr.appendChild(td);
    }
    tbody.appendChild(tr);
  }
}
