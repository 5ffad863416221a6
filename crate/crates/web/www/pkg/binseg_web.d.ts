/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Graph-based segments filled with their mean colour.
     */
    egs(sigma: number, k: number, min_size: number): Uint8Array;
    image(): Uint8Array;
    /**
     * Superpixels merged by binary code, boundaries drawn over the image.
     */
    merged(superpixels: number, global: boolean): Uint8Array;
    constructor(seed: number, height: number, width: number);
    /**
     * SLIC boundaries over the image.
     */
    superpixels(superpixels: number, compactness: number): Uint8Array;
    readonly height: number;
    readonly stats: RenderStats;
    readonly width: number;
}

/**
 * Summary of the most recent render.
 */
export class RenderStats {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Mean IoU against the scene's ground truth, in [0, 1].
     */
    mean_iou: number;
    /**
     * Regions in the rendered partition.
     */
    regions: number;
    /**
     * Superpixels before merging (equals `regions` for unmerged methods).
     */
    superpixels: number;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly __wbg_get_renderstats_mean_iou: (a: number) => number;
    readonly __wbg_get_renderstats_regions: (a: number) => number;
    readonly __wbg_get_renderstats_superpixels: (a: number) => number;
    readonly __wbg_renderstats_free: (a: number, b: number) => void;
    readonly __wbg_set_renderstats_mean_iou: (a: number, b: number) => void;
    readonly __wbg_set_renderstats_regions: (a: number, b: number) => void;
    readonly __wbg_set_renderstats_superpixels: (a: number, b: number) => void;
    readonly demo_egs: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly demo_height: (a: number) => number;
    readonly demo_image: (a: number) => [number, number];
    readonly demo_merged: (a: number, b: number, c: number) => [number, number, number, number];
    readonly demo_new: (a: number, b: number, c: number) => [number, number, number];
    readonly demo_stats: (a: number) => number;
    readonly demo_superpixels: (a: number, b: number, c: number) => [number, number, number, number];
    readonly demo_width: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
