/* tslint:disable */
/* eslint-disable */

/**
 * Bowl soliton over `ℝⁿ` together with its blow-down.
 */
export class Bowl {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Blow-down neck radius over the cylinder radius; 1 for the cylinder.
     */
    cylinder_ratio(): number;
    heights(): Float64Array;
    constructor(n: number, r_max: number);
    radii(): Float64Array;
}

/**
 * Curve shortening flow of an ellipse until just before it vanishes near
 * `t = -1`.
 */
export class EllipseFlow {
    free(): void;
    [Symbol.dispose](): void;
    frame_count(): number;
    constructor(a: number, b: number, n: number);
    /**
     * Interleaved `x, y` coordinates of frame `m`; empty past the last frame.
     */
    outline(m: number): Float64Array;
    /**
     * Gaussian density about the extinction point, one value per frame.
     */
    theta(): Float64Array;
    times(): Float64Array;
}

/**
 * Interleaved `x, y` samples of the Angenent oval at time `t < 0`.
 */
export function oval_outline(t: number, samples: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_bowl_free: (a: number, b: number) => void;
    readonly __wbg_ellipseflow_free: (a: number, b: number) => void;
    readonly bowl_cylinder_ratio: (a: number) => number;
    readonly bowl_heights: (a: number) => [number, number];
    readonly bowl_new: (a: number, b: number) => [number, number, number];
    readonly bowl_radii: (a: number) => [number, number];
    readonly ellipseflow_frame_count: (a: number) => number;
    readonly ellipseflow_new: (a: number, b: number, c: number) => [number, number, number];
    readonly ellipseflow_outline: (a: number, b: number) => [number, number];
    readonly ellipseflow_theta: (a: number) => [number, number];
    readonly ellipseflow_times: (a: number) => [number, number];
    readonly oval_outline: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
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
