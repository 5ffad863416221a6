/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const __wbg_get_renderstats_mean_iou: (a: number) => number;
export const __wbg_get_renderstats_regions: (a: number) => number;
export const __wbg_get_renderstats_superpixels: (a: number) => number;
export const __wbg_renderstats_free: (a: number, b: number) => void;
export const __wbg_set_renderstats_mean_iou: (a: number, b: number) => void;
export const __wbg_set_renderstats_regions: (a: number, b: number) => void;
export const __wbg_set_renderstats_superpixels: (a: number, b: number) => void;
export const demo_egs: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const demo_height: (a: number) => number;
export const demo_image: (a: number) => [number, number];
export const demo_merged: (a: number, b: number, c: number) => [number, number, number, number];
export const demo_new: (a: number, b: number, c: number) => [number, number, number];
export const demo_stats: (a: number) => number;
export const demo_superpixels: (a: number, b: number, c: number) => [number, number, number, number];
export const demo_width: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
