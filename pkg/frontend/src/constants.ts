// Parameter ranges and steps. These must stay exactly in sync with the
// service's clamping rules: the UI must never show a value the service
// would echo back differently.

export interface ParamRange {
    min: number;
    max: number;
    step: number;
}

export const PARAM_RANGES: Record<"beta" | "mu" | "nu", ParamRange> = {
    beta: { min: 0.1, max: 5, step: 0.05 },
    mu: { min: 0.5, max: 3, step: 0.05 },
    nu: { min: 0.01, max: 1, step: 0.01 },
};

// Per-noise (mu, nu) presets; beta is left to the user.
export const PRESETS: Record<string, { mu: number; nu: number }> = {
    babble: { mu: 2.5, nu: 1 },
    machinery: { mu: 2, nu: 0.9 },
    traffic: { mu: 1.75, nu: 0.75 },
};

export const RULES = ["proposed", "sgjmap", "jmap", "bypass"] as const;
export type Rule = (typeof RULES)[number];

// Slider burst coalescing window for render requests.
export const DEBOUNCE_MS = 150;
