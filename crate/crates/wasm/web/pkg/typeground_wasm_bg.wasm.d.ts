/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_synthdemo_free: (a: number, b: number) => void;
export const apply_typedefs: (a: number, b: number, c: number, d: number) => [number, number];
export const builtin_listings: () => [number, number];
export const synthdemo_coverage: (a: number, b: number) => [number, number];
export const synthdemo_new: (a: number, b: number) => number;
export const synthdemo_query_count: (a: number) => number;
export const synthdemo_run: (a: number, b: number, c: number) => [number, number];
export const synthdemo_typedefs: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
