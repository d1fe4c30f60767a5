/** Typed client for the analysis server.
 *
 * Every number the UI displays is a field of one of these responses; the
 * client never recomputes a metric. The json/csv strings in the response
 * are exact server bytes, kept verbatim so exports are byte-identical to
 * what the command line would write.
 */

export interface ReportSummary {
  drop_count: number;
  density_per_cm2: number;
  coverage_pct: number;
  vmd_um: number | null;
  dv01_um: number | null;
  dv09_um: number | null;
  relative_span: number | null;
  mean_area_um2: number | null;
}

export interface DropRecord {
  id: number;
  pixel_area: number;
  centroid_x: number;
  centroid_y: number;
  bbox_x0: number;
  bbox_y0: number;
  bbox_x1: number;
  bbox_y1: number;
  area_um2: number;
  diameter_um: number;
  corrected_diameter_um: number;
}

export type WarningLevel = "none" | "questionable" | "unfeasible";

export interface Report {
  parameters: {
    bin_threshold: number;
    marker_threshold: number;
    correction: { a: number; b: number };
    geometry: {
      card_width_um: number;
      card_height_um: number;
      image_width_px: number;
      image_height_px: number;
    };
  };
  drops: DropRecord[];
  summary: ReportSummary;
  warning: { level: WarningLevel; coverage_pct: number };
  fractal: { dimension: number; slope: number; r_squared: number } | null;
  provenance: { input: string; timestamp: string; version: string };
}

export interface AnalyzeResponse {
  report: Report;
  overlay_png_base64: string | null;
  markers_png_base64: string | null;
  report_json: string | null;
  report_csv: string | null;
}

export interface AnalyzeParams {
  binThreshold: number;
  markerThreshold: number;
  cardWidthMm: number;
  cardHeightMm: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface ClientOptions {
  baseUrl?: string;
  fetchImpl?: FetchLike;
}

function resolveFetch(options: ClientOptions): FetchLike {
  // wrap the global so the unbound reference never loses its receiver
  return options.fetchImpl ?? ((input, init) => fetch(input, init));
}

async function errorDetail(resp: Response): Promise<string> {
  try {
    const body: unknown = await resp.json();
    if (body && typeof body === "object" && "detail" in body) {
      const detail = (body as { detail: unknown }).detail;
      if (typeof detail === "string") return detail;
    }
  } catch {
    // body was not json; fall through to the generic message
  }
  return `request failed with status ${resp.status}`;
}

export async function analyzeCard(
  image: Blob,
  filename: string,
  params: AnalyzeParams,
  options: ClientOptions = {},
): Promise<AnalyzeResponse> {
  const form = new FormData();
  // wrap in a File so the filename survives every FormData implementation
  form.append("image", new File([image], filename, { type: image.type || "image/png" }));
  form.append("card_width_mm", String(params.cardWidthMm));
  form.append("card_height_mm", String(params.cardHeightMm));
  form.append("bin_threshold", String(params.binThreshold));
  form.append("marker_threshold", String(params.markerThreshold));
  form.append("include_overlay", "true");
  form.append("include_markers", "true");
  form.append("include_json", "true");
  form.append("include_csv", "true");
  const resp = await resolveFetch(options)(`${options.baseUrl ?? ""}/api/analyze`, {
    method: "POST",
    body: form,
  });
  if (!resp.ok) throw new ApiError(resp.status, await errorDetail(resp));
  return (await resp.json()) as AnalyzeResponse;
}

export async function fetchHealth(
  options: ClientOptions = {},
): Promise<{ status: string; version: string }> {
  const resp = await resolveFetch(options)(`${options.baseUrl ?? ""}/api/health`);
  if (!resp.ok) throw new ApiError(resp.status, await errorDetail(resp));
  return (await resp.json()) as { status: string; version: string };
}
