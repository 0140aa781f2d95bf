/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_adireport_free: (a: number, b: number) => void;
export const __wbg_get_adireport_intervals: (a: number) => [number, number];
export const __wbg_get_adireport_iterations: (a: number) => number;
export const __wbg_get_adireport_left_shifts: (a: number) => [number, number];
export const __wbg_get_adireport_residuals: (a: number) => [number, number];
export const __wbg_get_adireport_right_shifts: (a: number) => [number, number];
export const __wbg_get_slice_max: (a: number) => number;
export const __wbg_get_slice_max_error: (a: number) => number;
export const __wbg_get_slice_min: (a: number) => number;
export const __wbg_get_slice_resolution: (a: number) => number;
export const __wbg_get_slice_time: (a: number) => number;
export const __wbg_get_slice_values: (a: number) => [number, number];
export const __wbg_set_adireport_intervals: (a: number, b: number, c: number) => void;
export const __wbg_set_adireport_iterations: (a: number, b: number) => void;
export const __wbg_set_adireport_left_shifts: (a: number, b: number, c: number) => void;
export const __wbg_set_adireport_residuals: (a: number, b: number, c: number) => void;
export const __wbg_set_adireport_right_shifts: (a: number, b: number, c: number) => void;
export const __wbg_set_slice_max: (a: number, b: number) => void;
export const __wbg_set_slice_max_error: (a: number, b: number) => void;
export const __wbg_set_slice_min: (a: number, b: number) => void;
export const __wbg_set_slice_resolution: (a: number, b: number) => void;
export const __wbg_set_slice_time: (a: number, b: number) => void;
export const __wbg_set_slice_values: (a: number, b: number, c: number) => void;
export const __wbg_slice_free: (a: number, b: number) => void;
export const adi_report: (a: number, b: number, c: number, d: number) => [number, number, number];
export const heat_slice: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const poisson_slice: (a: number, b: number, c: number, d: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_start: () => void;
