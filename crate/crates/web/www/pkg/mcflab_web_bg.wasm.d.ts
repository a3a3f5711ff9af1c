/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_bowl_free: (a: number, b: number) => void;
export const __wbg_ellipseflow_free: (a: number, b: number) => void;
export const bowl_cylinder_ratio: (a: number) => number;
export const bowl_heights: (a: number) => [number, number];
export const bowl_new: (a: number, b: number) => [number, number, number];
export const bowl_radii: (a: number) => [number, number];
export const ellipseflow_frame_count: (a: number) => number;
export const ellipseflow_new: (a: number, b: number, c: number) => [number, number, number];
export const ellipseflow_outline: (a: number, b: number) => [number, number];
export const ellipseflow_theta: (a: number) => [number, number];
export const ellipseflow_times: (a: number) => [number, number];
export const oval_outline: (a: number, b: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
