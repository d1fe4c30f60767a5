/** End-to-end UI tests against recorded server responses.
 *
 * The fixtures under tests/fixtures were captured from the real analysis
 * server, card bytes included, so every assertion here is against genuine
 * payloads rather than hand-written ones.
 */

import { afterEach, describe, expect, it, vi } from "vitest";
import type { FetchLike } from "../src/api.js";
import { buildApp, type AppHandle } from "../src/main.js";

import blankFixture from "./fixtures/blank.json";
import dumbbellHigh from "./fixtures/dumbbell_high.json";
import dumbbellLow from "./fixtures/dumbbell_low.json";
import error400 from "./fixtures/error_400.json";
import questionableFixture from "./fixtures/questionable.json";
import sixDrops from "./fixtures/six_drops.json";
import unfeasibleFixture from "./fixtures/unfeasible.json";

interface Fixture {
  card_png_base64: string;
  status: number;
  body: unknown;
}

function fileFrom(fixture: Fixture, name: string): File {
  const raw = atob(fixture.card_png_base64);
  const bytes = new Uint8Array(raw.length);
  for (let i = 0; i < raw.length; i++) bytes[i] = raw.charCodeAt(i);
  return new File([bytes], name, { type: "image/png" });
}

function jsonResponse(status: number, payload: unknown): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: () => Promise.resolve(payload),
  } as unknown as Response;
}

const HEALTH = { status: "ok", version: "0.1.0" };

/** Serves /api/health plus a scripted queue of analyze responses. */
function queueFetch(queue: Fixture[]): { fetchImpl: FetchLike; calls: FormData[] } {
  const calls: FormData[] = [];
  const fetchImpl: FetchLike = (input, init) => {
    if (input.endsWith("/api/health")) return Promise.resolve(jsonResponse(200, HEALTH));
    calls.push(init?.body as FormData);
    const next = queue.shift();
    if (!next) throw new Error(`unexpected analyze call #${calls.length}`);
    return Promise.resolve(jsonResponse(next.status, next.body));
  };
  return { fetchImpl, calls };
}

/** Serves analyze responses keyed by the marker_threshold form field. */
function thresholdFetch(routes: Record<string, Fixture>): {
  fetchImpl: FetchLike;
  calls: string[];
} {
  const calls: string[] = [];
  const fetchImpl: FetchLike = (input, init) => {
    if (input.endsWith("/api/health")) return Promise.resolve(jsonResponse(200, HEALTH));
    const form = init?.body as FormData;
    const threshold = String(form.get("marker_threshold"));
    calls.push(threshold);
    const fixture = routes[threshold];
    if (!fixture) throw new Error(`no fixture for marker_threshold=${threshold}`);
    return Promise.resolve(jsonResponse(fixture.status, fixture.body));
  };
  return { fetchImpl, calls };
}

function mount(fetchImpl: FetchLike): AppHandle {
  const root = document.createElement("div");
  document.body.appendChild(root);
  return buildApp(root, { fetchImpl });
}

function text(handle: AppHandle, selector: string): string {
  return handle.root.querySelector(selector)?.textContent ?? "";
}

function markerSlider(handle: AppHandle): HTMLInputElement {
  const sliders = handle.root.querySelectorAll<HTMLInputElement>('input[type="range"]');
  return sliders[1]; // [0] is binarization, [1] is marker
}

function slide(handle: AppHandle, value: string): void {
  const slider = markerSlider(handle);
  slider.value = value;
  slider.dispatchEvent(new Event("input"));
}

afterEach(() => {
  document.body.textContent = "";
  vi.useRealTimers();
});

describe("upload and analyze", () => {
  it("renders the summary, histogram and overlay for a populated card", async () => {
    const { fetchImpl } = queueFetch([sixDrops]);
    const handle = mount(fetchImpl);
    await handle.setFile(fileFrom(sixDrops, "card.png"), "card.png");

    expect(text(handle, ".drop-count")).toBe("6 drops");
    expect(text(handle, ".summary-table")).toContain("coverage");
    const bars = handle.root.querySelectorAll<HTMLElement>(".histogram-bar");
    expect(bars.length).toBeGreaterThan(0);
    const total = Array.from(bars).reduce((acc, b) => acc + Number(b.dataset.count), 0);
    expect(total).toBe(6);
    const rows = handle.root.querySelectorAll(".drops-table tbody tr");
    expect(rows).toHaveLength(6);
    expect(text(handle, ".status")).toContain("card.png");
  });

  it("shows an empty histogram message for a blank card", async () => {
    const { fetchImpl } = queueFetch([blankFixture]);
    const handle = mount(fetchImpl);
    await handle.setFile(fileFrom(blankFixture, "blank.png"), "blank.png");

    expect(text(handle, ".drop-count")).toBe("0 drops");
    expect(text(handle, ".histogram-empty")).toBe("no drops detected");
    expect(handle.root.querySelectorAll(".histogram-bar")).toHaveLength(0);
  });
});

describe("saturation banner", () => {
  it("appears exactly for questionable and unfeasible coverage", async () => {
    const { fetchImpl } = queueFetch([
      sixDrops,
      questionableFixture,
      unfeasibleFixture,
      sixDrops,
    ]);
    const handle = mount(fetchImpl);
    const banner = () => handle.root.querySelector<HTMLElement>(".banner")!;

    await handle.setFile(fileFrom(sixDrops, "a.png"), "a.png");
    expect(banner().hidden).toBe(true);

    await handle.setFile(fileFrom(questionableFixture, "b.png"), "b.png");
    expect(banner().hidden).toBe(false);
    expect(banner().className).toBe("banner banner-questionable");
    expect(banner().textContent).toContain("above 20%");

    await handle.setFile(fileFrom(unfeasibleFixture, "c.png"), "c.png");
    expect(banner().hidden).toBe(false);
    expect(banner().className).toBe("banner banner-unfeasible");
    expect(banner().textContent).toContain("above 70%");

    await handle.setFile(fileFrom(sixDrops, "d.png"), "d.png");
    expect(banner().hidden).toBe(true);
  });
});

describe("marker threshold slider", () => {
  it("splits the dumbbell into two drops when lowered through the crossover", async () => {
    vi.useFakeTimers();
    const { fetchImpl, calls } = thresholdFetch({ "0.6": dumbbellHigh, "0.3": dumbbellLow });
    const handle = mount(fetchImpl);

    // park the slider above the crossover, then upload
    slide(handle, "0.6");
    await handle.setFile(fileFrom(dumbbellHigh, "dumbbell.png"), "dumbbell.png");
    expect(text(handle, ".drop-count")).toBe("1 drop");

    // a burst of moves ending below the crossover
    slide(handle, "0.5");
    slide(handle, "0.4");
    slide(handle, "0.3");
    vi.advanceTimersByTime(249);
    expect(calls).toHaveLength(1); // still inside the debounce window
    vi.advanceTimersByTime(1);
    await handle.idle();

    expect(text(handle, ".drop-count")).toBe("2 drops");
    // the burst collapsed into a single request carrying the final value
    expect(calls).toEqual(["0.6", "0.3"]);
  });

  it("drops a stale response that lands after a newer request", async () => {
    vi.useFakeTimers();
    const pending: Array<{ threshold: string; resolve: (r: Response) => void }> = [];
    const fetchImpl: FetchLike = (input, init) => {
      if (input.endsWith("/api/health")) return Promise.resolve(jsonResponse(200, HEALTH));
      const form = init?.body as FormData;
      return new Promise<Response>((resolve) => {
        pending.push({ threshold: String(form.get("marker_threshold")), resolve });
      });
    };
    const handle = mount(fetchImpl);

    slide(handle, "0.6");
    const upload = handle.setFile(fileFrom(dumbbellHigh, "dumbbell.png"), "dumbbell.png");
    expect(pending).toHaveLength(1);

    // user keeps moving while the first request is on the wire
    slide(handle, "0.3");
    vi.advanceTimersByTime(250);
    expect(pending).toHaveLength(1); // second request queued, not yet issued

    // the now-stale first response arrives
    pending[0].resolve(jsonResponse(200, dumbbellHigh.body));
    await vi.waitFor(() => expect(pending).toHaveLength(2));
    expect(handle.state.response).toBeNull(); // stale answer was dropped

    pending[1].resolve(jsonResponse(200, dumbbellLow.body));
    await upload;
    await handle.idle();
    expect(text(handle, ".drop-count")).toBe("2 drops");
    expect(pending.map((p) => p.threshold)).toEqual(["0.6", "0.3"]);
  });
});

describe("export", () => {
  it("is unavailable before the first analysis", () => {
    const { fetchImpl } = queueFetch([]);
    const handle = mount(fetchImpl);
    expect(handle.exportPayload("json")).toBeNull();
    expect(handle.exportPayload("csv")).toBeNull();
    expect(handle.root.querySelector<HTMLButtonElement>(".export-json")!.disabled).toBe(true);
    expect(handle.root.querySelector<HTMLButtonElement>(".export-csv")!.disabled).toBe(true);
  });

  it("hands back the server report bytes unmodified", async () => {
    const { fetchImpl } = queueFetch([sixDrops]);
    const handle = mount(fetchImpl);
    await handle.setFile(fileFrom(sixDrops, "card.png"), "card.png");

    const body = sixDrops.body as { report_json: string; report_csv: string };
    const json = handle.exportPayload("json")!;
    expect(json.filename).toBe("card.json");
    expect(json.text).toBe(body.report_json);
    const csv = handle.exportPayload("csv")!;
    expect(csv.filename).toBe("card.csv");
    expect(csv.text).toBe(body.report_csv);
    expect(handle.root.querySelector<HTMLButtonElement>(".export-json")!.disabled).toBe(false);
    expect(handle.root.querySelector<HTMLButtonElement>(".export-csv")!.disabled).toBe(false);
  });
});

describe("errors", () => {
  it("surfaces the server detail and keeps the last completed metrics", async () => {
    const { fetchImpl } = queueFetch([sixDrops, error400, sixDrops]);
    const handle = mount(fetchImpl);
    await handle.setFile(fileFrom(sixDrops, "card.png"), "card.png");
    expect(text(handle, ".drop-count")).toBe("6 drops");

    await handle.setFile(fileFrom(sixDrops, "card.png"), "card.png");
    const errorBox = handle.root.querySelector<HTMLElement>(".error")!;
    expect(errorBox.hidden).toBe(false);
    expect(errorBox.textContent).toBe("threshold must lie in [0, 1], got 1.5");
    // metrics still show the last completed analysis
    expect(text(handle, ".drop-count")).toBe("6 drops");
    expect(text(handle, ".status")).toContain("last completed");

    await handle.setFile(fileFrom(sixDrops, "card.png"), "card.png");
    expect(errorBox.hidden).toBe(true);
  });
});

describe("view switching", () => {
  it("swaps the image between the server overlay and marker renders", async () => {
    const { fetchImpl } = queueFetch([sixDrops]);
    const handle = mount(fetchImpl);
    await handle.setFile(fileFrom(sixDrops, "card.png"), "card.png");

    const body = sixDrops.body as {
      overlay_png_base64: string;
      markers_png_base64: string;
    };
    const image = handle.root.querySelector<HTMLImageElement>(".card-image")!;
    expect(handle.state.view).toBe("overlay");
    expect(image.hidden).toBe(false);
    expect(image.src).toBe(`data:image/png;base64,${body.overlay_png_base64}`);

    handle.setView("markers");
    expect(image.src).toBe(`data:image/png;base64,${body.markers_png_base64}`);

    const active = handle.root.querySelectorAll(".view-button.active");
    expect(active).toHaveLength(1);
    expect(active[0].textContent).toBe("markers");
  });
});
