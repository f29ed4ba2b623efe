/* tslint:disable */
/* eslint-disable */

/**
 * Parses and checks a single-file model.
 */
export function check(text: string): string;

/**
 * Size report for `arch` (comma-separated widths) and, when `platform` is
 * non-empty, the deployability decision under `policy` (`paper` or
 * `strict`).
 */
export function estimate(arch: string, platform: string, policy: string): string;

/**
 * Ids of the built-in platforms, for the page's drop-down.
 */
export function platforms(): string;

/**
 * Runs `thing`'s statechart in `text` on an event list such as
 * `io?sample; feed?verdict(1)`.
 */
export function simulate(text: string, thing: string, events: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly check: (a: number, b: number) => [number, number];
    readonly estimate: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly platforms: () => [number, number];
    readonly simulate: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
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
