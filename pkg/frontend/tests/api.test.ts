import { describe, expect, it, vi } from "vitest";

import { ApiError, TunerClient } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
    return new Response(JSON.stringify(body), {
        status,
        headers: { "content-type": "application/json" },
    });
}

describe("TunerClient", () => {
    it("posts the wav body and returns the session info", async () => {
        const fetchFn = vi.fn(async (url: RequestInfo | URL, init?: RequestInit) => {
            expect(String(url)).toBe("/sessions");
            expect(init?.method).toBe("POST");
            return jsonResponse(
                {
                    id: "abc",
                    sample_rate_hz: 16000,
                    duration_seconds: 5.2,
                    params: { beta: 1, mu: 1.74, nu: 0.126, rule: "proposed" },
                },
                201,
            );
        });
        const client = new TunerClient("", fetchFn as unknown as typeof fetch);
        const info = await client.createSession(new ArrayBuffer(8));
        expect(info.id).toBe("abc");
        expect(info.params.mu).toBeCloseTo(1.74);
    });

    it("surfaces the clamped echo from PUT params", async () => {
        const fetchFn = vi.fn(async (url: RequestInfo | URL, init?: RequestInit) => {
            expect(String(url)).toBe("/sessions/abc/params");
            expect(init?.method).toBe("PUT");
            const sent = JSON.parse(String(init?.body));
            expect(sent.beta).toBe(0.01);
            return jsonResponse({ beta: 0.1, mu: 1.74, nu: 0.126, rule: "proposed" });
        });
        const client = new TunerClient("", fetchFn as unknown as typeof fetch);
        const echo = await client.updateParams("abc", { beta: 0.01 });
        expect(echo.beta).toBe(0.1); // display must follow the echo, not the input
    });

    it("raises ApiError with the service detail on failures", async () => {
        const fetchFn = vi.fn(async () => jsonResponse({ detail: "unknown session" }, 404));
        const client = new TunerClient("", fetchFn as unknown as typeof fetch);
        await expect(client.updateParams("gone", { beta: 1 })).rejects.toMatchObject({
            status: 404,
            message: "unknown session",
        });
        await expect(client.render("gone", 0, 1)).rejects.toBeInstanceOf(ApiError);
    });

    it("passes span and kind through to the spectrogram endpoint", async () => {
        const fetchFn = vi.fn(async (url: RequestInfo | URL) => {
            expect(String(url)).toBe("/sessions/abc/spectrogram?start=2.5&dur=1&kind=enhanced");
            return jsonResponse({ frames: 1, bins: 2, hop_seconds: 0.01, bin_hz: 31.25, db: [[0, -3]] });
        });
        const client = new TunerClient("", fetchFn as unknown as typeof fetch);
        const spec = await client.spectrogram("abc", 2.5, 1, "enhanced");
        expect(spec.db[0][1]).toBe(-3);
    });

    it("returns the preroll warning header from render", async () => {
        const fetchFn = vi.fn(async () => {
            return new Response(new Blob([new Uint8Array(4)]), {
                status: 200,
                headers: {
                    "content-type": "audio/wav",
                    "X-Preroll-Warning": "initialization audio looks speech-active",
                },
            });
        });
        const client = new TunerClient("", fetchFn as unknown as typeof fetch);
        const out = await client.render("abc", 0, 1);
        expect(out.prerollWarning).toMatch(/speech-active/);
    });
});
