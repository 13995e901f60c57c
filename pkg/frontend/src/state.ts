import { PARAM_RANGES, PRESETS, Rule } from "./constants.js";

export interface TunerState {
    sessionId: string | null;
    beta: number;
    mu: number;
    nu: number;
    rule: Rule;
    preset: string | null; // active preset name, cleared by manual mu/nu edits
    spanStart: number; // seconds
    spanDuration: number; // seconds
    lastRenderStatus: string;
}

export function initialState(): TunerState {
    return {
        sessionId: null,
        beta: 1,
        mu: 1.74,
        nu: 0.126,
        rule: "proposed",
        preset: null,
        spanStart: 0,
        spanDuration: 0,
        lastRenderStatus: "idle",
    };
}

export function clampParam(name: "beta" | "mu" | "nu", value: number): number {
    const r = PARAM_RANGES[name];
    return Math.min(r.max, Math.max(r.min, value));
}

export function applyPreset(state: TunerState, name: string): TunerState {
    const p = PRESETS[name];
    if (!p) {
        throw new Error(`unknown preset: ${name}`);
    }
    return { ...state, mu: p.mu, nu: p.nu, preset: name };
}

/** Manual parameter edit; clamps and clears the preset indicator for mu/nu. */
export function setParam(
    state: TunerState,
    name: "beta" | "mu" | "nu",
    value: number,
): TunerState {
    const next = { ...state, [name]: clampParam(name, value) };
    if (name !== "beta") {
        next.preset = null;
    }
    return next;
}
