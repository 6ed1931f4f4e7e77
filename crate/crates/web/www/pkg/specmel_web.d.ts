/* tslint:disable */
/* eslint-disable */

export class Image {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Row-major RGBA bytes, ready for `ImageData`.
     */
    rgba(): Uint8Array;
    readonly height: number;
    readonly width: number;
}

export class PairedReport {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    qq_observed(): Float64Array;
    qq_theoretical(): Float64Array;
    readonly df: number;
    readonly mean_diff: number;
    readonly n: number;
    readonly p: number;
    readonly shapiro_p: number;
    readonly shapiro_w: number;
    readonly t: number;
}

/**
 * Row-major `n_mels × (n_fft/2 + 1)` filterbank weights.
 */
export function filterbank_weights(sample_rate: number, n_fft: number, n_mels: number, variant: string, normalization: string): Float64Array;

/**
 * Shapiro–Wilk and paired t-test on `a − b`.
 */
export function paired_test(a: Float64Array, b: Float64Array): PairedReport;

/**
 * Viridis image of a pure tone's linear or mel dB spectrogram, low
 * frequencies at the bottom.
 */
export function tone_spectrogram(freq_hz: number, duration_secs: number, sample_rate: number, kind: string, n_fft: number, hop_length: number, n_mels: number): Image;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_image_free: (a: number, b: number) => void;
    readonly __wbg_pairedreport_free: (a: number, b: number) => void;
    readonly filterbank_weights: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly image_height: (a: number) => number;
    readonly image_rgba: (a: number) => [number, number];
    readonly image_width: (a: number) => number;
    readonly paired_test: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly pairedreport_df: (a: number) => number;
    readonly pairedreport_mean_diff: (a: number) => number;
    readonly pairedreport_n: (a: number) => number;
    readonly pairedreport_p: (a: number) => number;
    readonly pairedreport_qq_observed: (a: number) => [number, number];
    readonly pairedreport_qq_theoretical: (a: number) => [number, number];
    readonly pairedreport_shapiro_p: (a: number) => number;
    readonly pairedreport_shapiro_w: (a: number) => number;
    readonly pairedreport_t: (a: number) => number;
    readonly tone_spectrogram: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
