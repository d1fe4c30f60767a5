/** Typed client for the analysis server.
 *
 * Every number the UI displays is a field of one of these responses; the
 * client never recomputes a metric. The json/csv strings in the response
 * are exact server bytes, kept verbatim so exports are byte-identical to
 * what the command line would write.
 */
export class ApiError extends Error {
    constructor(status, detail) {
        super(detail);
        this.status = status;
        this.name = "ApiError";
    }
}
function resolveFetch(options) {
    // wrap the global so the unbound reference never loses its receiver
    return options.fetchImpl ?? ((input, init) => fetch(input, init));
}
async function errorDetail(resp) {
    try {
        const body = await resp.json();
        if (body && typeof body === "object" && "detail" in body) {
            const detail = body.detail;
            if (typeof detail === "string")
                return detail;
        }
    }
    catch {
        // body was not json; fall through to the generic message
    }
    return `request failed with status ${resp.status}`;
}
export async function analyzeCard(image, filename, params, options = {}) {
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
    if (!resp.ok)
        throw new ApiError(resp.status, await errorDetail(resp));
    return (await resp.json());
}
export async function fetchHealth(options = {}) {
    const resp = await resolveFetch(options)(`${options.baseUrl ?? ""}/api/health`);
    if (!resp.ok)
        throw new ApiError(resp.status, await errorDetail(resp));
    return (await resp.json());
}
