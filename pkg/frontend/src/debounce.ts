// Render scheduling: slider bursts are coalesced over a debounce window,
// at most one render request is in flight, the newest state always wins,
// and responses that are not from the newest launched request are dropped.

import { DEBOUNCE_MS } from "./constants.js";

export interface RenderOutcome<R> {
    seq: number;
    result: R;
}

/**
 * Sequence-number gate: only the newest issued request may deliver.
 * Guards against transport-level reordering or duplicated deliveries;
 * a response for seq 3 arriving after seq 5 was issued is stale.
 */
export class ResponseGate {
    private newest = 0;

    issue(): number {
        return ++this.newest;
    }

    shouldDeliver(seq: number): boolean {
        return seq === this.newest;
    }
}

export class RenderScheduler<S, R> {
    private timer: ReturnType<typeof setTimeout> | null = null;
    private pending: S | null = null;
    private inFlight = false;
    private gate = new ResponseGate();
    requestsSent = 0;

    constructor(
        private renderFn: (state: S) => Promise<R>,
        private onResult: (outcome: RenderOutcome<R>) => void,
        private onError: (error: unknown) => void,
        private debounceMs: number = DEBOUNCE_MS,
    ) {}

    /** Note a state change; a render will go out after the burst settles. */
    request(state: S): void {
        this.pending = state;
        if (this.timer === null && !this.inFlight) {
            this.arm();
        }
    }

    private arm(): void {
        this.timer = setTimeout(() => {
            this.timer = null;
            this.fire();
        }, this.debounceMs);
    }

    private fire(): void {
        if (this.inFlight || this.pending === null) {
            return;
        }
        const state = this.pending;
        this.pending = null;
        const seq = this.gate.issue();
        this.inFlight = true;
        this.requestsSent += 1;
        this.renderFn(state).then(
            (result) => this.settle(seq, result, null),
            (error) => this.settle(seq, null, error),
        );
    }

    private settle(seq: number, result: R | null, error: unknown): void {
        this.inFlight = false;
        if (this.gate.shouldDeliver(seq)) {
            if (error !== null) {
                this.onError(error);
            } else {
                this.onResult({ seq, result: result as R });
            }
        }
        if (this.pending !== null && this.timer === null) {
            this.arm();
        }
    }
}
