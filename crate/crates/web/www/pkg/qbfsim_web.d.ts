/* tslint:disable */
/* eslint-disable */

/**
 * Builds KBKF(t) with its reference proof, checks it and reports metrics.
 * `sigma` is `""` (QU-res), `"atomic"` or `"herbrand"`.
 */
export function kbkf_refutation(t: number, sigma: string): string;

/**
 * Sizes of Ω_n and of its short R1 refutation.
 */
export function omega_stats(n: number): string;

/**
 * Translates QDIMACS text into clauses; `mode` is `skolem` or `epr`.
 */
export function translate_qdimacs(text: string, mode: string, wrap: boolean): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly kbkf_refutation: (a: number, b: number, c: number) => [number, number, number, number];
    readonly omega_stats: (a: number) => [number, number, number, number];
    readonly translate_qdimacs: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
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
