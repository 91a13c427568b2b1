/* tslint:disable */
/* eslint-disable */

export class Wave {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Advances the solution by `span`.
     */
    advance(span: number): void;
    /**
     * Current gaps, which the flow should leave unchanged.
     */
    gaps(n_max: number): Float64Array;
    constructor(q: Float64Array, mean: number, modes: number, dt: number);
    profile(samples: number): Float64Array;
    time(): number;
}

/**
 * Gaps `gamma_1..gamma_{n_max}` of the finite-gap potential.
 */
export function finite_gap_gaps(q: Float64Array, n_max: number): Float64Array;

/**
 * Samples of the finite-gap potential with real parameters `q` on `[0, 2 pi)`.
 */
export function finite_gap_profile(q: Float64Array, samples: number): Float64Array;

/**
 * `omega_n` for `n = 1..=n_max` from dense actions `gamma_1, gamma_2, ...`.
 */
export function frequencies(gamma: Float64Array, n_max: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_wave_free: (a: number, b: number) => void;
    readonly finite_gap_gaps: (a: number, b: number, c: number) => [number, number, number, number];
    readonly finite_gap_profile: (a: number, b: number, c: number) => [number, number, number, number];
    readonly frequencies: (a: number, b: number, c: number) => [number, number, number, number];
    readonly wave_advance: (a: number, b: number) => [number, number];
    readonly wave_gaps: (a: number, b: number) => [number, number, number, number];
    readonly wave_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly wave_profile: (a: number, b: number) => [number, number];
    readonly wave_time: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
