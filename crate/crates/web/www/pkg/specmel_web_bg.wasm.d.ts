/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_image_free: (a: number, b: number) => void;
export const __wbg_pairedreport_free: (a: number, b: number) => void;
export const filterbank_weights: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
export const image_height: (a: number) => number;
export const image_rgba: (a: number) => [number, number];
export const image_width: (a: number) => number;
export const paired_test: (a: number, b: number, c: number, d: number) => [number, number, number];
export const pairedreport_df: (a: number) => number;
export const pairedreport_mean_diff: (a: number) => number;
export const pairedreport_n: (a: number) => number;
export const pairedreport_p: (a: number) => number;
export const pairedreport_qq_observed: (a: number) => [number, number];
export const pairedreport_qq_theoretical: (a: number) => [number, number];
export const pairedreport_shapiro_p: (a: number) => number;
export const pairedreport_shapiro_w: (a: number) => number;
export const pairedreport_t: (a: number) => number;
export const tone_spectrogram: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
