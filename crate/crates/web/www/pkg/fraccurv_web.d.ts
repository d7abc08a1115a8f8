/* tslint:disable */
/* eslint-disable */

/**
 * Similarity dimension of a JSON scene.
 */
export function dimension(scene_json: string): number;

/**
 * `[C0, C0 variation, C1, closed-form χ or NaN]` for the union of `ε`-discs around the sites.
 *
 * The sites lie within `rho^level / √2` of the dust, so the union is the parallel set of the
 * dust up to that Hausdorff error.
 */
export function dust_curvatures(rho: number, eps: number, level: number): Float64Array;

/**
 * Images of the lower-left corner under all words of length `level`, as `[x0, y0, x1, y1, ..]`.
 */
export function dust_sites(rho: number, level: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly dimension: (a: number, b: number) => [number, number, number];
    readonly dust_curvatures: (a: number, b: number, c: number) => [number, number, number, number];
    readonly dust_sites: (a: number, b: number) => [number, number, number, number];
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
