// Spectrogram display: paints the service's dB matrix onto a canvas.
// The matrix is never recomputed client-side, so the view shows exactly
// what the engine computed.

import { SpectrogramData } from "./api.js";

const DB_SPAN = 70; // dynamic range below the matrix maximum

function colorFor(norm: number): [number, number, number] {
    // dark blue -> magenta -> yellow ramp
    const r = Math.min(255, Math.round(280 * norm));
    const g = Math.max(0, Math.round(255 * (norm - 0.6) / 0.4));
    const b = Math.round(90 + 120 * norm * (1 - norm) * 4 - 90 * norm);
    return [r, g, Math.max(0, Math.min(255, b))];
}

export function drawSpectrogram(canvas: HTMLCanvasElement, data: SpectrogramData): void {
    const ctx = canvas.getContext("2d");
    if (!ctx) {
        return;
    }
    const { frames, bins, db } = data;
    if (frames === 0 || bins === 0) {
        ctx.clearRect(0, 0, canvas.width, canvas.height);
        return;
    }
    let peak = -Infinity;
    for (const row of db) {
        for (const v of row) {
            if (v > peak) peak = v;
        }
    }
    const image = ctx.createImageData(frames, bins);
    for (let t = 0; t < frames; t++) {
        for (let k = 0; k < bins; k++) {
            const norm = Math.max(0, Math.min(1, (db[t][k] - (peak - DB_SPAN)) / DB_SPAN));
            const [r, g, b] = colorFor(norm);
            // low frequencies at the bottom
            const idx = 4 * ((bins - 1 - k) * frames + t);
            image.data[idx] = r;
            image.data[idx + 1] = g;
            image.data[idx + 2] = b;
            image.data[idx + 3] = 255;
        }
    }
    const off = new OffscreenCanvas(frames, bins);
    const offCtx = off.getContext("2d")!;
    offCtx.putImageData(image, 0, 0);
    ctx.imageSmoothingEnabled = false;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    ctx.drawImage(off, 0, 0, canvas.width, canvas.height);
}
