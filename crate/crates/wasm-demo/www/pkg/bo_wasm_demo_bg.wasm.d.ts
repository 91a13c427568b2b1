/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_wave_free: (a: number, b: number) => void;
export const finite_gap_gaps: (a: number, b: number, c: number) => [number, number, number, number];
export const finite_gap_profile: (a: number, b: number, c: number) => [number, number, number, number];
export const frequencies: (a: number, b: number, c: number) => [number, number, number, number];
export const wave_advance: (a: number, b: number) => [number, number];
export const wave_gaps: (a: number, b: number) => [number, number, number, number];
export const wave_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const wave_profile: (a: number, b: number) => [number, number];
export const wave_time: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
