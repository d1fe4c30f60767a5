/** Trailing-edge debounce for the threshold sliders: a burst of slider
 * events collapses into one call with the final arguments, fired one
 * interval after the burst stops.
 */
export const DEBOUNCE_MS = 250;
export function debounce(fn, ms = DEBOUNCE_MS) {
    let timer = null;
    const call = (...args) => {
        if (timer !== null)
            clearTimeout(timer);
        timer = setTimeout(() => {
            timer = null;
            fn(...args);
        }, ms);
    };
    const wrapped = call;
    wrapped.cancel = () => {
        if (timer !== null)
            clearTimeout(timer);
        timer = null;
    };
    wrapped.pending = () => timer !== null;
    return wrapped;
}
