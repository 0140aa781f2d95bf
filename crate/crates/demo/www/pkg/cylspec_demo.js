/* @ts-self-types="./cylspec_demo.d.ts" */

export class AdiReport {
    static __wrap(ptr) {
        const obj = Object.create(AdiReport.prototype);
        obj.__wbg_ptr = ptr;
        AdiReportFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        AdiReportFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_adireport_free(ptr, 0);
    }
    /**
     * `[a, b, c, d]`: spectral intervals of the two sides.
     * @returns {Float64Array}
     */
    get intervals() {
        const ret = wasm.__wbg_get_adireport_intervals(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get iterations() {
        const ret = wasm.__wbg_get_adireport_iterations(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @returns {Float64Array}
     */
    get left_shifts() {
        const ret = wasm.__wbg_get_adireport_left_shifts(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get residuals() {
        const ret = wasm.__wbg_get_adireport_residuals(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get right_shifts() {
        const ret = wasm.__wbg_get_adireport_right_shifts(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * `[a, b, c, d]`: spectral intervals of the two sides.
     * @param {Float64Array} arg0
     */
    set intervals(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_adireport_intervals(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {number} arg0
     */
    set iterations(arg0) {
        wasm.__wbg_set_adireport_iterations(this.__wbg_ptr, arg0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set left_shifts(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_adireport_left_shifts(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set residuals(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_adireport_residuals(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set right_shifts(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_adireport_right_shifts(this.__wbg_ptr, ptr0, len0);
    }
}
if (Symbol.dispose) AdiReport.prototype[Symbol.dispose] = AdiReport.prototype.free;

export class Slice {
    static __wrap(ptr) {
        const obj = Object.create(Slice.prototype);
        obj.__wbg_ptr = ptr;
        SliceFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        SliceFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_slice_free(ptr, 0);
    }
    /**
     * Relative max error against the exact solution on the grid.
     * @returns {number}
     */
    get max_error() {
        const ret = wasm.__wbg_get_slice_max_error(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get max() {
        const ret = wasm.__wbg_get_slice_max(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get min() {
        const ret = wasm.__wbg_get_slice_min(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get resolution() {
        const ret = wasm.__wbg_get_slice_resolution(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @returns {number}
     */
    get time() {
        const ret = wasm.__wbg_get_slice_time(this.__wbg_ptr);
        return ret;
    }
    /**
     * Row-major samples, `values[i * res + j]` at `(x_j, y_i)` or `(r_j, z_i)`.
     * @returns {Float64Array}
     */
    get values() {
        const ret = wasm.__wbg_get_slice_values(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * Relative max error against the exact solution on the grid.
     * @param {number} arg0
     */
    set max_error(arg0) {
        wasm.__wbg_set_slice_max_error(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set max(arg0) {
        wasm.__wbg_set_slice_max(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set min(arg0) {
        wasm.__wbg_set_slice_min(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set resolution(arg0) {
        wasm.__wbg_set_slice_resolution(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set time(arg0) {
        wasm.__wbg_set_slice_time(this.__wbg_ptr, arg0);
    }
    /**
     * Row-major samples, `values[i * res + j]` at `(x_j, y_i)` or `(r_j, z_i)`.
     * @param {Float64Array} arg0
     */
    set values(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_slice_values(this.__wbg_ptr, ptr0, len0);
    }
}
if (Symbol.dispose) Slice.prototype[Symbol.dispose] = Slice.prototype.free;

/**
 * @param {number} m
 * @param {number} q
 * @param {number} scale
 * @param {number} tol
 * @returns {AdiReport}
 */
export function adi_report(m, q, scale, tol) {
    const ret = wasm.adi_report(m, q, scale, tol);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return AdiReport.__wrap(ret[0]);
}

/**
 * @param {number} m
 * @param {number} steps
 * @param {number} h
 * @param {number} alpha
 * @param {number} z
 * @param {number} res
 * @returns {Slice}
 */
export function heat_slice(m, steps, h, alpha, z, res) {
    const ret = wasm.heat_slice(m, steps, h, alpha, z, res);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return Slice.__wrap(ret[0]);
}

/**
 * @param {number} m
 * @param {number} p
 * @param {number} theta
 * @param {number} res
 * @returns {Slice}
 */
export function poisson_slice(m, p, theta, res) {
    const ret = wasm.poisson_slice(m, p, theta, res);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return Slice.__wrap(ret[0]);
}
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg_Error_30c8987f7c2ed4e2: function(arg0, arg1) {
            const ret = Error(getStringFromWasm0(arg0, arg1));
            return ret;
        },
        __wbg___wbindgen_throw_41e9ee4f547fc59a: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
        },
        __wbindgen_init_externref_table: function() {
            const table = wasm.__wbindgen_externrefs;
            const offset = table.grow(4);
            table.set(0, undefined);
            table.set(offset + 0, undefined);
            table.set(offset + 1, null);
            table.set(offset + 2, true);
            table.set(offset + 3, false);
        },
    };
    return {
        __proto__: null,
        "./cylspec_demo_bg.js": import0,
    };
}

const AdiReportFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_adireport_free(ptr, 1));
const SliceFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_slice_free(ptr, 1));

function getArrayF64FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getFloat64ArrayMemory0().subarray(ptr / 8, ptr / 8 + len);
}

let cachedFloat64ArrayMemory0 = null;
function getFloat64ArrayMemory0() {
    if (cachedFloat64ArrayMemory0 === null || cachedFloat64ArrayMemory0.byteLength === 0) {
        cachedFloat64ArrayMemory0 = new Float64Array(wasm.memory.buffer);
    }
    return cachedFloat64ArrayMemory0;
}

function getStringFromWasm0(ptr, len) {
    return decodeText(ptr >>> 0, len);
}

let cachedUint8ArrayMemory0 = null;
function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
}

function passArrayF64ToWasm0(arg, malloc) {
    const ptr = malloc(arg.length * 8, 8) >>> 0;
    getFloat64ArrayMemory0().set(arg, ptr / 8);
    WASM_VECTOR_LEN = arg.length;
    return ptr;
}

function takeFromExternrefTable0(idx) {
    const value = wasm.__wbindgen_externrefs.get(idx);
    wasm.__externref_table_dealloc(idx);
    return value;
}

let cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
cachedTextDecoder.decode();
const MAX_SAFARI_DECODE_BYTES = 2146435072;
let numBytesDecoded = 0;
function decodeText(ptr, len) {
    numBytesDecoded += len;
    if (numBytesDecoded >= MAX_SAFARI_DECODE_BYTES) {
        cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
        cachedTextDecoder.decode();
        numBytesDecoded = len;
    }
    return cachedTextDecoder.decode(getUint8ArrayMemory0().subarray(ptr, ptr + len));
}

let WASM_VECTOR_LEN = 0;

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedFloat64ArrayMemory0 = null;
    cachedUint8ArrayMemory0 = null;
    wasm.__wbindgen_start();
    return wasm;
}

async function __wbg_load(module, imports) {
    if (typeof Response === 'function' && module instanceof Response) {
        if (!module.ok) {
            throw new Error(`failed to fetch Wasm: ${module.status} ${module.statusText} fetching '${module.url}'`);
        }

        if (typeof WebAssembly.instantiateStreaming === 'function') {
            try {
                return await WebAssembly.instantiateStreaming(module, imports);
            } catch (e) {
                const validResponse = expectedResponseType(module.type);

                if (validResponse && module.headers.get('Content-Type') !== 'application/wasm') {
                    console.warn("`WebAssembly.instantiateStreaming` failed because your server does not serve Wasm with `application/wasm` MIME type. Falling back to `WebAssembly.instantiate` which is slower. Original error:\n", e);

                } else { throw e; }
            }
        }

        const bytes = await module.arrayBuffer();
        return await WebAssembly.instantiate(bytes, imports);
    } else {
        const instance = await WebAssembly.instantiate(module, imports);

        if (instance instanceof WebAssembly.Instance) {
            return { instance, module };
        } else {
            return instance;
        }
    }

    function expectedResponseType(type) {
        switch (type) {
            case 'basic': case 'cors': case 'default': return true;
        }
        return false;
    }
}

function initSync(module) {
    if (wasm !== undefined) return wasm;


    if (module !== undefined) {
        if (Object.getPrototypeOf(module) === Object.prototype) {
            ({module} = module)
        } else {
            console.warn('using deprecated parameters for `initSync()`; pass a single object instead')
        }
    }

    const imports = __wbg_get_imports();
    if (!(module instanceof WebAssembly.Module)) {
        module = new WebAssembly.Module(module);
    }
    const instance = new WebAssembly.Instance(module, imports);
    return __wbg_finalize_init(instance, module);
}

async function __wbg_init(module_or_path) {
    if (wasm !== undefined) return wasm;


    if (module_or_path !== undefined) {
        if (Object.getPrototypeOf(module_or_path) === Object.prototype) {
            ({module_or_path} = module_or_path)
        } else {
            console.warn('using deprecated parameters for the initialization function; pass a single object instead')
        }
    }

    if (module_or_path === undefined) {
        module_or_path = new URL('cylspec_demo_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
