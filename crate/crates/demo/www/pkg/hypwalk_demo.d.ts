/* tslint:disable */
/* eslint-disable */

/**
 * `Σ arccos(x_i x_{i+1}) − π` on a grid of `{0 ≤ x_i ≤ 1, x_1 + x_2 + x_3 = 2}`.
 */
export function arccos_landscape(resolution: number): string;

/**
 * Builds the polygon with uniform central angles, the given apothem
 * weights (comma separated, empty for uniform) and cycle integer `k`, and
 * evaluates the singularity criterion.
 */
export function polygon_view(m: number, k: number, weights: string): string;

/**
 * Simple random walk on the side pairings: histogram of where the walks
 * head on the boundary circle, and the drift.
 */
export function walk_view(m: number, k: number, weights: string, steps: number, paths: number, bins: number, seed: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly arccos_landscape: (a: number) => [number, number];
    readonly polygon_view: (a: number, b: number, c: number, d: number) => [number, number];
    readonly walk_view: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
