/* tslint:disable */
/* eslint-disable */

/**
 * A seeded synthetic world with every resource built.
 */
export class SynthDemo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Coverage of gold types by the top `ell` retrieved concepts.
     */
    coverage(max_ell: number): string;
    /**
     * Panics only on an impossible generator configuration; inputs are clamped.
     */
    constructor(seed: number, noise: number);
    query_count(): number;
    /**
     * Types every held-out query with the given parameters (a JSON object
     * with `lambda`, `eta_s`, `eta_c`, `ell_esa`, `ell_elmo`).
     */
    run(params_json: string): string;
    /**
     * The generated type-definition rules.
     */
    typedefs(): string;
}

/**
 * Applies rules to primitive types given one per line or separated by
 * commas or whitespace.
 */
export function apply_typedefs(source: string, primitives: string): string;

/**
 * Names and sources of the shipped type-definition listings.
 */
export function builtin_listings(): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_synthdemo_free: (a: number, b: number) => void;
    readonly apply_typedefs: (a: number, b: number, c: number, d: number) => [number, number];
    readonly builtin_listings: () => [number, number];
    readonly synthdemo_coverage: (a: number, b: number) => [number, number];
    readonly synthdemo_new: (a: number, b: number) => number;
    readonly synthdemo_query_count: (a: number) => number;
    readonly synthdemo_run: (a: number, b: number, c: number) => [number, number];
    readonly synthdemo_typedefs: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
