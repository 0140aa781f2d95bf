/* tslint:disable */
/* eslint-disable */

export class AdiReport {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `[a, b, c, d]`: spectral intervals of the two sides.
     */
    intervals: Float64Array;
    iterations: number;
    left_shifts: Float64Array;
    residuals: Float64Array;
    right_shifts: Float64Array;
}

export class Slice {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Relative max error against the exact solution on the grid.
     */
    max_error: number;
    max: number;
    min: number;
    resolution: number;
    time: number;
    /**
     * Row-major samples, `values[i * res + j]` at `(x_j, y_i)` or `(r_j, z_i)`.
     */
    values: Float64Array;
}

export function adi_report(m: number, q: number, scale: number, tol: number): AdiReport;

export function heat_slice(m: number, steps: number, h: number, alpha: number, z: number, res: number): Slice;

export function poisson_slice(m: number, p: number, theta: number, res: number): Slice;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_adireport_free: (a: number, b: number) => void;
    readonly __wbg_get_adireport_intervals: (a: number) => [number, number];
    readonly __wbg_get_adireport_iterations: (a: number) => number;
    readonly __wbg_get_adireport_left_shifts: (a: number) => [number, number];
    readonly __wbg_get_adireport_residuals: (a: number) => [number, number];
    readonly __wbg_get_adireport_right_shifts: (a: number) => [number, number];
    readonly __wbg_get_slice_max: (a: number) => number;
    readonly __wbg_get_slice_max_error: (a: number) => number;
    readonly __wbg_get_slice_min: (a: number) => number;
    readonly __wbg_get_slice_resolution: (a: number) => number;
    readonly __wbg_get_slice_time: (a: number) => number;
    readonly __wbg_get_slice_values: (a: number) => [number, number];
    readonly __wbg_set_adireport_intervals: (a: number, b: number, c: number) => void;
    readonly __wbg_set_adireport_iterations: (a: number, b: number) => void;
    readonly __wbg_set_adireport_left_shifts: (a: number, b: number, c: number) => void;
    readonly __wbg_set_adireport_residuals: (a: number, b: number, c: number) => void;
    readonly __wbg_set_adireport_right_shifts: (a: number, b: number, c: number) => void;
    readonly __wbg_set_slice_max: (a: number, b: number) => void;
    readonly __wbg_set_slice_max_error: (a: number, b: number) => void;
    readonly __wbg_set_slice_min: (a: number, b: number) => void;
    readonly __wbg_set_slice_resolution: (a: number, b: number) => void;
    readonly __wbg_set_slice_time: (a: number, b: number) => void;
    readonly __wbg_set_slice_values: (a: number, b: number, c: number) => void;
    readonly __wbg_slice_free: (a: number, b: number) => void;
    readonly adi_report: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly heat_slice: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly poisson_slice: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
