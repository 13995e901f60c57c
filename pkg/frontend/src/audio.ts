// A/B playback of the noisy source span against the latest enhanced
// render. Both sides cover the same span, so toggling keeps time
// alignment by carrying the playback position across.

export class AbPlayer {
    private noisy: HTMLAudioElement | null = null;
    private enhanced: HTMLAudioElement | null = null;
    private active: "noisy" | "enhanced" = "enhanced";
    private urls: string[] = [];

    setNoisy(wav: Blob): void {
        this.noisy = this.swap(this.noisy, wav);
    }

    setEnhanced(wav: Blob): void {
        this.enhanced = this.swap(this.enhanced, wav);
    }

    private swap(old: HTMLAudioElement | null, wav: Blob): HTMLAudioElement {
        const wasPlaying = old !== null && !old.paused;
        const position = old?.currentTime ?? 0;
        old?.pause();
        const url = URL.createObjectURL(wav);
        this.urls.push(url);
        const el = new Audio(url);
        el.currentTime = position;
        if (wasPlaying) {
            void el.play();
        }
        return el;
    }

    get side(): "noisy" | "enhanced" {
        return this.active;
    }

    play(): void {
        void this.current()?.play();
    }

    pause(): void {
        this.current()?.pause();
    }

    /** Switch sides at the same playback offset within the span. */
    toggle(): "noisy" | "enhanced" {
        const from = this.current();
        this.active = this.active === "noisy" ? "enhanced" : "noisy";
        const to = this.current();
        if (from && to) {
            const wasPlaying = !from.paused;
            from.pause();
            to.currentTime = from.currentTime;
            if (wasPlaying) {
                void to.play();
            }
        }
        return this.active;
    }

    private current(): HTMLAudioElement | null {
        return this.active === "noisy" ? this.noisy : this.enhanced;
    }

    dispose(): void {
        this.noisy?.pause();
        this.enhanced?.pause();
        for (const url of this.urls) {
            URL.revokeObjectURL(url);
        }
        this.urls = [];
    }
}
