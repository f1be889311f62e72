/* tslint:disable */
/* eslint-disable */

/**
 * NW, GR_approx, SCR, Mañé and CR of a circle map at `eps_cells` cells.
 */
export function circle_sets(map: string, n: number, eps_cells: number, horizon: number): string;

/**
 * Return times of `V` in `g_M`, against the swap's even return times.
 */
export function gm_returns(m: string, horizon: number): string;

/**
 * Nonwandering cells of the spiral disk.
 */
export function spiral_nw(n_r: number, n_a: number, eps_cells: number, horizon: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly circle_sets: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly gm_returns: (a: number, b: number, c: number) => [number, number, number, number];
    readonly spiral_nw: (a: number, b: number, c: number, d: number) => [number, number, number, number];
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
