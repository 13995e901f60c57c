// Thin client for the tuning service HTTP API. The fetch function is
// injectable so tests can run without a server.

import { Rule } from "./constants.js";

export interface SessionInfo {
    id: string;
    sample_rate_hz: number;
    duration_seconds: number;
    params: EchoedParams;
}

export interface EchoedParams {
    beta: number;
    mu: number;
    nu: number;
    rule: Rule;
}

export interface SpectrogramData {
    frames: number;
    bins: number;
    hop_seconds: number;
    bin_hz: number;
    db: number[][];
}

export class ApiError extends Error {
    constructor(
        public status: number,
        message: string,
    ) {
        super(message);
    }
}

export class TunerClient {
    constructor(
        private baseUrl = "",
        private fetchFn: typeof fetch = fetch.bind(globalThis),
    ) {}

    private async check(resp: Response): Promise<Response> {
        if (!resp.ok) {
            let detail = resp.statusText;
            try {
                const body = await resp.json();
                if (body && body.detail) detail = String(body.detail);
            } catch {
                // non-JSON error body; keep the status text
            }
            throw new ApiError(resp.status, detail);
        }
        return resp;
    }

    async createSession(wav: Blob | ArrayBuffer): Promise<SessionInfo> {
        const resp = await this.check(
            await this.fetchFn(`${this.baseUrl}/sessions`, { method: "POST", body: wav }),
        );
        return (await resp.json()) as SessionInfo;
    }

    async updateParams(
        sessionId: string,
        params: Partial<EchoedParams>,
    ): Promise<EchoedParams> {
        const resp = await this.check(
            await this.fetchFn(`${this.baseUrl}/sessions/${sessionId}/params`, {
                method: "PUT",
                headers: { "content-type": "application/json" },
                body: JSON.stringify(params),
            }),
        );
        return (await resp.json()) as EchoedParams;
    }

    async render(
        sessionId: string,
        start: number,
        dur: number,
    ): Promise<{ wav: Blob; prerollWarning: string | null }> {
        const resp = await this.check(
            await this.fetchFn(
                `${this.baseUrl}/sessions/${sessionId}/render?start=${start}&dur=${dur}`,
            ),
        );
        return {
            wav: await resp.blob(),
            prerollWarning: resp.headers.get("X-Preroll-Warning"),
        };
    }

    async spectrogram(
        sessionId: string,
        start: number,
        dur: number,
        kind: "noisy" | "enhanced",
    ): Promise<SpectrogramData> {
        const resp = await this.check(
            await this.fetchFn(
                `${this.baseUrl}/sessions/${sessionId}/spectrogram?start=${start}&dur=${dur}&kind=${kind}`,
            ),
        );
        return (await resp.json()) as SpectrogramData;
    }

    async deleteSession(sessionId: string): Promise<void> {
        await this.check(
            await this.fetchFn(`${this.baseUrl}/sessions/${sessionId}`, { method: "DELETE" }),
        );
    }
}
