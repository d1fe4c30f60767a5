/** Application wiring: upload a card, steer the two thresholds with live
 * re-analysis, switch between original/overlay/markers views, and export
 * the server-produced report.
 *
 * Concurrency model: at most one request on the wire. User actions bump a
 * sequence number immediately; if a request is in flight the newest action
 * waits in a one-slot queue and re-reads the parameters when it fires, so
 * bursts coalesce and stale responses are never shown.
 */

import { analyzeCard, fetchHealth, type ClientOptions } from "./api.js";
import { DEBOUNCE_MS, debounce } from "./debounce.js";
import {
  applyError,
  applyResponse,
  beginRequest,
  clampUnit,
  createState,
  type SessionState,
  type ViewMode,
} from "./state.js";
import { renderBanner, renderDrops, renderHistogram, renderSummary } from "./render.js";

export interface AppOptions extends ClientOptions {
  debounceMs?: number;
}

export interface ExportPayload {
  filename: string;
  text: string;
  mime: string;
}

export interface AppHandle {
  state: SessionState;
  root: HTMLElement;
  setFile(blob: Blob, name: string): Promise<void>;
  setView(view: ViewMode): void;
  exportPayload(format: "json" | "csv"): ExportPayload | null;
  /** resolves once no request is in flight or queued */
  idle(): Promise<void>;
}

const VIEWS: { mode: ViewMode; label: string }[] = [
  { mode: "original", label: "original" },
  { mode: "overlay", label: "overlay" },
  { mode: "markers", label: "markers" },
];

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function sliderRow(
  doc: Document,
  label: string,
  initial: number,
  onInput: (value: number, display: HTMLElement) => void,
): { row: HTMLElement; input: HTMLInputElement; display: HTMLElement } {
  const row = el(doc, "label", "slider-row");
  row.appendChild(el(doc, "span", "slider-label", label));
  const input = el(doc, "input") as HTMLInputElement;
  input.type = "range";
  input.min = "0";
  input.max = "1";
  input.step = "0.005";
  input.value = String(initial);
  const display = el(doc, "span", "slider-value", initial.toFixed(3));
  input.addEventListener("input", () => onInput(Number(input.value), display));
  row.append(input, display);
  return { row, input, display };
}

function stem(name: string): string {
  const base = name.replace(/^.*[\\/]/, "");
  const dot = base.lastIndexOf(".");
  return dot > 0 ? base.slice(0, dot) : base;
}

export function buildApp(root: HTMLElement, options: AppOptions = {}): AppHandle {
  const doc = root.ownerDocument;
  const state = createState();
  const debounceMs = options.debounceMs ?? DEBOUNCE_MS;

  root.textContent = "";
  root.className = "dropmeter-app";

  // ---- controls column ----------------------------------------------
  const controls = el(doc, "section", "controls");
  const fileInput = el(doc, "input") as HTMLInputElement;
  fileInput.type = "file";
  fileInput.accept = "image/png,image/jpeg,.ppm,.pgm";
  const fileLabel = el(doc, "label", "file-picker");
  fileLabel.append(el(doc, "span", "file-picker-text", "choose a card image"), fileInput);
  controls.appendChild(fileLabel);

  const binSlider = sliderRow(doc, "binarization", state.params.binThreshold, (v, display) => {
    state.params.binThreshold = clampUnit(v);
    display.textContent = state.params.binThreshold.toFixed(3);
    debouncedAnalyze();
  });
  const markerSlider = sliderRow(doc, "marker", state.params.markerThreshold, (v, display) => {
    state.params.markerThreshold = clampUnit(v);
    display.textContent = state.params.markerThreshold.toFixed(3);
    debouncedAnalyze();
  });
  controls.append(binSlider.row, markerSlider.row);

  const geometryRow = el(doc, "div", "geometry-row");
  const makeDim = (label: string, value: number, apply: (v: number) => void) => {
    const wrap = el(doc, "label", "dim-field");
    wrap.appendChild(el(doc, "span", undefined, label));
    const input = el(doc, "input") as HTMLInputElement;
    input.type = "number";
    input.min = "1";
    input.step = "0.1";
    input.value = String(value);
    input.addEventListener("change", () => {
      const v = Number(input.value);
      if (Number.isFinite(v) && v > 0) {
        apply(v);
        debouncedAnalyze();
      }
    });
    wrap.appendChild(input);
    return wrap;
  };
  geometryRow.append(
    makeDim("card width (mm)", state.params.cardWidthMm, (v) => (state.params.cardWidthMm = v)),
    makeDim("card height (mm)", state.params.cardHeightMm, (v) => (state.params.cardHeightMm = v)),
  );
  controls.appendChild(geometryRow);

  const exportRow = el(doc, "div", "export-row");
  const exportJson = el(doc, "button", "export-json", "export JSON");
  const exportCsv = el(doc, "button", "export-csv", "export CSV");
  exportJson.disabled = true;
  exportCsv.disabled = true;
  exportRow.append(exportJson, exportCsv);
  controls.appendChild(exportRow);

  const status = el(doc, "p", "status", "upload a water-sensitive card to begin");
  controls.appendChild(status);
  const errorBox = el(doc, "p", "error");
  errorBox.hidden = true;
  controls.appendChild(errorBox);

  // ---- viewer column -------------------------------------------------
  const viewer = el(doc, "section", "viewer");
  const viewBar = el(doc, "div", "view-bar");
  const viewButtons = new Map<ViewMode, HTMLButtonElement>();
  for (const { mode, label } of VIEWS) {
    const btn = el(doc, "button", "view-button", label);
    btn.disabled = true;
    btn.addEventListener("click", () => setView(mode));
    viewButtons.set(mode, btn);
    viewBar.appendChild(btn);
  }
  const image = el(doc, "img", "card-image") as HTMLImageElement;
  image.alt = "spray card";
  image.hidden = true;
  viewer.append(viewBar, image);

  // ---- results column ------------------------------------------------
  const results = el(doc, "section", "results");
  const banner = el(doc, "div", "banner");
  banner.hidden = true;
  const dropCount = el(doc, "p", "drop-count", "");
  const summaryTable = el(doc, "table", "summary-table");
  const summaryBody = el(doc, "tbody");
  summaryTable.appendChild(summaryBody);
  const histogram = el(doc, "div", "histogram");
  const dropsTable = el(doc, "table", "drops-table");
  const dropsHead = el(doc, "thead");
  const headRow = el(doc, "tr");
  for (const title of ["id", "diameter (µm)", "corrected (µm)", "area (µm²)", "pixels"]) {
    headRow.appendChild(el(doc, "th", undefined, title));
  }
  dropsHead.appendChild(headRow);
  const dropsBody = el(doc, "tbody");
  dropsTable.append(dropsHead, dropsBody);
  const dropsWrap = el(doc, "div", "drops-scroll");
  dropsWrap.appendChild(dropsTable);
  results.append(banner, dropCount, summaryTable, el(doc, "h2", undefined, "diameter histogram"), histogram, el(doc, "h2", undefined, "drops"), dropsWrap);

  root.append(controls, viewer, results);

  // ---- request plumbing ----------------------------------------------
  let inFlight = false;
  let queuedSeq: number | null = null;
  let settled: Promise<void> = Promise.resolve();

  async function issue(seq: number): Promise<void> {
    if (!state.file) return;
    inFlight = true;
    status.textContent = "analyzing…";
    try {
      const resp = await analyzeCard(state.file.blob, state.file.name, state.params, options);
      if (applyResponse(state, seq, resp)) renderResults();
    } catch (err) {
      const message = err instanceof Error ? err.message : String(err);
      if (applyError(state, seq, message)) renderResults();
    } finally {
      inFlight = false;
      if (queuedSeq !== null) {
        const next = queuedSeq;
        queuedSeq = null;
        settled = issue(next);
      }
    }
  }

  function requestAnalysis(): void {
    if (!state.file) return;
    const seq = beginRequest(state);
    if (inFlight) {
      queuedSeq = seq; // newest action wins; older queued value is dropped
      return;
    }
    settled = issue(seq);
  }

  const debouncedAnalyze = debounce(requestAnalysis, debounceMs);

  async function idle(): Promise<void> {
    // each queued request replaces `settled`, so loop until it sticks
    let previous: Promise<void>;
    do {
      previous = settled;
      await previous;
    } while (settled !== previous || inFlight || queuedSeq !== null);
  }

  // ---- rendering -------------------------------------------------------
  function renderResults(): void {
    errorBox.hidden = state.error === null;
    errorBox.textContent = state.error ?? "";
    const report = state.response?.report ?? null;
    renderBanner(banner, report);
    if (state.response && report) {
      const n = report.summary.drop_count;
      dropCount.textContent = `${n} ${n === 1 ? "drop" : "drops"}`;
      renderSummary(summaryBody, report);
      renderHistogram(histogram, report);
      renderDrops(dropsBody, report);
      exportJson.disabled = state.response.report_json === null;
      exportCsv.disabled = state.response.report_csv === null;
      status.textContent = state.error
        ? "showing the last completed analysis"
        : `analyzed ${report.provenance.input}`;
    } else if (state.error === null) {
      status.textContent = state.busy ? "analyzing…" : status.textContent;
    } else {
      status.textContent = "analysis failed";
    }
    updateViewer();
  }

  function updateViewer(): void {
    const overlay = state.response?.overlay_png_base64 ?? null;
    const markers = state.response?.markers_png_base64 ?? null;
    viewButtons.get("original")!.disabled = state.originalUrl === null;
    viewButtons.get("overlay")!.disabled = overlay === null;
    viewButtons.get("markers")!.disabled = markers === null;
    for (const [mode, btn] of viewButtons) {
      btn.classList.toggle("active", mode === state.view);
    }
    let src: string | null = null;
    if (state.view === "original") src = state.originalUrl;
    else if (state.view === "overlay") src = overlay && `data:image/png;base64,${overlay}`;
    else src = markers && `data:image/png;base64,${markers}`;
    image.hidden = src === null;
    if (src !== null) image.src = src;
  }

  function setView(view: ViewMode): void {
    state.view = view;
    updateViewer();
  }

  function exportPayload(format: "json" | "csv"): ExportPayload | null {
    if (!state.response || !state.file) return null;
    const text = format === "json" ? state.response.report_json : state.response.report_csv;
    if (text === null) return null;
    return {
      filename: `${stem(state.file.name)}.${format}`,
      text,
      mime: format === "json" ? "application/json" : "text/csv",
    };
  }

  function download(format: "json" | "csv"): void {
    const payload = exportPayload(format);
    if (!payload) return;
    try {
      const url = URL.createObjectURL(new Blob([payload.text], { type: payload.mime }));
      const a = el(doc, "a") as HTMLAnchorElement;
      a.href = url;
      a.download = payload.filename;
      doc.body.appendChild(a);
      a.click();
      a.remove();
      setTimeout(() => URL.revokeObjectURL(url), 0);
    } catch {
      // download helpers vary across embedders; the payload getter is the contract
    }
  }
  exportJson.addEventListener("click", () => download("json"));
  exportCsv.addEventListener("click", () => download("csv"));

  async function setFile(blob: Blob, name: string): Promise<void> {
    state.file = { blob, name };
    state.originalUrl = null;
    try {
      state.originalUrl = URL.createObjectURL(blob);
    } catch {
      // no object URLs here; the original view stays disabled
    }
    debouncedAnalyze.cancel();
    requestAnalysis();
    await idle();
  }

  fileInput.addEventListener("change", () => {
    const file = fileInput.files?.[0];
    if (file) void setFile(file, file.name);
  });

  void fetchHealth(options)
    .then((h) => {
      status.textContent = `server ok (v${h.version}); upload a card to begin`;
    })
    .catch(() => {
      status.textContent = "analysis server unreachable";
    });

  return { state, root, setFile, setView, exportPayload, idle };
}

// Browser entry point: mount on the #app shell if the page provides one.
const mountPoint = typeof document === "undefined" ? null : document.getElementById("app");
if (mountPoint) buildApp(mountPoint);
