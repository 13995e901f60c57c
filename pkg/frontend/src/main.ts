import { ApiError, TunerClient } from "./api.js";
import { AbPlayer } from "./audio.js";
import { PARAM_RANGES, PRESETS, DEBOUNCE_MS, Rule, RULES } from "./constants.js";
import { RenderScheduler } from "./debounce.js";
import { drawSpectrogram } from "./spectrogram.js";
import { TunerState, applyPreset, initialState, setParam } from "./state.js";

const client = new TunerClient();
let state: TunerState = initialState();
let sourceDuration = 0;
const player = new AbPlayer();

function el<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
}

const banner = el<HTMLDivElement>("banner");
const statusLine = el<HTMLSpanElement>("status");

function showBanner(text: string): void {
    banner.textContent = text;
    banner.hidden = false;
}

function clearBanner(): void {
    banner.hidden = true;
}

// -- render scheduling -------------------------------------------------------

interface RenderResult {
    enhanced: Blob;
    noisySpec: ReturnType<TunerClient["spectrogram"]> extends Promise<infer T> ? T : never;
    enhancedSpec: ReturnType<TunerClient["spectrogram"]> extends Promise<infer T> ? T : never;
    prerollWarning: string | null;
}

async function renderCurrent(s: TunerState): Promise<RenderResult> {
    if (!s.sessionId) throw new Error("no session");
    const echoed = await client.updateParams(s.sessionId, {
        beta: s.beta,
        mu: s.mu,
        nu: s.nu,
        rule: s.rule,
    });
    // the service's clamped echo is authoritative for the display
    state = { ...state, beta: echoed.beta, mu: echoed.mu, nu: echoed.nu, rule: echoed.rule };
    reflectParams();
    const [rendered, noisySpec, enhancedSpec] = await Promise.all([
        client.render(s.sessionId, s.spanStart, s.spanDuration),
        client.spectrogram(s.sessionId, s.spanStart, s.spanDuration, "noisy"),
        client.spectrogram(s.sessionId, s.spanStart, s.spanDuration, "enhanced"),
    ]);
    return {
        enhanced: rendered.wav,
        noisySpec,
        enhancedSpec,
        prerollWarning: rendered.prerollWarning,
    };
}

const scheduler = new RenderScheduler<TunerState, RenderResult>(
    renderCurrent,
    ({ result }) => {
        state.lastRenderStatus = "ready";
        statusLine.textContent = "ready";
        player.setEnhanced(result.enhanced);
        drawSpectrogram(el<HTMLCanvasElement>("spec-noisy"), result.noisySpec);
        drawSpectrogram(el<HTMLCanvasElement>("spec-enhanced"), result.enhancedSpec);
        if (result.prerollWarning) {
            showBanner(`Warning: ${result.prerollWarning}`);
        } else {
            clearBanner();
        }
    },
    (error) => {
        state.lastRenderStatus = "error";
        statusLine.textContent = "error";
        if (error instanceof ApiError && error.status === 404) {
            showBanner("Session expired; upload the clip again.");
        } else {
            showBanner(`Render failed: ${error instanceof Error ? error.message : error}`);
        }
    },
    DEBOUNCE_MS,
);

function requestRender(): void {
    if (!state.sessionId) return;
    state.lastRenderStatus = "pending";
    statusLine.textContent = "rendering…";
    scheduler.request({ ...state });
}

// -- parameter controls --------------------------------------------------------

const sliders: Record<"beta" | "mu" | "nu", HTMLInputElement> = {
    beta: el<HTMLInputElement>("beta"),
    mu: el<HTMLInputElement>("mu"),
    nu: el<HTMLInputElement>("nu"),
};

function setupSliders(): void {
    for (const name of ["beta", "mu", "nu"] as const) {
        const s = sliders[name];
        const r = PARAM_RANGES[name];
        s.min = String(r.min);
        s.max = String(r.max);
        s.step = String(r.step);
        s.value = String(state[name]);
        s.addEventListener("input", () => {
            state = setParam(state, name, Number(s.value));
            reflectParams();
            requestRender();
        });
    }
    const rule = el<HTMLSelectElement>("rule");
    for (const r of RULES) {
        const opt = document.createElement("option");
        opt.value = r;
        opt.textContent = r;
        rule.appendChild(opt);
    }
    rule.value = state.rule;
    rule.addEventListener("change", () => {
        state = { ...state, rule: rule.value as Rule };
        requestRender();
    });

    const presetBox = el<HTMLDivElement>("presets");
    for (const name of Object.keys(PRESETS)) {
        const btn = document.createElement("button");
        btn.textContent = name;
        btn.dataset.preset = name;
        btn.addEventListener("click", () => {
            state = applyPreset(state, name);
            reflectParams();
            requestRender();
        });
        presetBox.appendChild(btn);
    }
}

function reflectParams(): void {
    for (const name of ["beta", "mu", "nu"] as const) {
        sliders[name].value = String(state[name]);
        el<HTMLSpanElement>(`${name}-value`).textContent = state[name].toFixed(2);
    }
    el<HTMLSelectElement>("rule").value = state.rule;
    for (const btn of el<HTMLDivElement>("presets").querySelectorAll("button")) {
        btn.classList.toggle("active", btn.dataset.preset === state.preset);
    }
}

// -- upload and span -----------------------------------------------------------

async function upload(file: File): Promise<void> {
    try {
        statusLine.textContent = "uploading…";
        const info = await client.createSession(file);
        state = { ...initialState(), sessionId: info.id };
        state.beta = info.params.beta;
        state.mu = info.params.mu;
        state.nu = info.params.nu;
        state.rule = info.params.rule;
        sourceDuration = info.duration_seconds;
        state.spanStart = Math.min(2, sourceDuration / 2);
        state.spanDuration = Math.max(0, sourceDuration - state.spanStart);
        const start = el<HTMLInputElement>("span-start");
        const dur = el<HTMLInputElement>("span-dur");
        start.max = String(sourceDuration);
        start.value = String(state.spanStart);
        dur.max = String(sourceDuration);
        dur.value = String(state.spanDuration);
        el<HTMLDivElement>("controls").hidden = false;
        clearBanner();
        reflectParams();
        await refreshNoisyReference();
        requestRender();
    } catch (error) {
        showBanner(`Upload failed: ${error instanceof Error ? error.message : error}`);
        statusLine.textContent = "error";
    }
}

function setupUploadAndSpan(): void {
    const input = el<HTMLInputElement>("file");
    input.addEventListener("change", () => {
        const file = input.files?.[0];
        if (file) void upload(file);
    });
    for (const id of ["span-start", "span-dur"] as const) {
        el<HTMLInputElement>(id).addEventListener("change", () => {
            const start = Number(el<HTMLInputElement>("span-start").value);
            const dur = Number(el<HTMLInputElement>("span-dur").value);
            state.spanStart = Math.max(0, Math.min(start, sourceDuration));
            state.spanDuration = Math.max(0.1, Math.min(dur, sourceDuration - state.spanStart));
            void refreshNoisyReference();
            requestRender();
        });
    }
    el<HTMLButtonElement>("play").addEventListener("click", () => player.play());
    el<HTMLButtonElement>("pause").addEventListener("click", () => player.pause());
    const ab = el<HTMLButtonElement>("ab-toggle");
    ab.addEventListener("click", () => {
        ab.textContent = `listening: ${player.toggle()}`;
    });
}

async function refreshNoisyReference(): Promise<void> {
    if (!state.sessionId) return;
    try {
        await client.updateParams(state.sessionId, { rule: "bypass" });
        const bypass = await client.render(state.sessionId, state.spanStart, state.spanDuration);
        player.setNoisy(bypass.wav);
    } finally {
        await client.updateParams(state.sessionId, { rule: state.rule });
    }
}

setupSliders();
setupUploadAndSpan();
reflectParams();
