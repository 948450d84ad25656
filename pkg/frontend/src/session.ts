/**
 * Exploration workflow driver: submit intent, advance rounds, compose the
 * final artwork. A thin stateful wrapper over ApiClient that mirrors the
 * service's session document; it performs no local search logic.
 */

import { ApiClient, ArtworkItemPayload, SessionDoc } from "./api.js";
import { GalleryState, galleryFromSession, selectCandidate } from "./gallery.js";
import { IntentEditorState, serializeIntent, validateIntent } from "./intent.js";

export class ExplorationClient {
    private session: SessionDoc | null = null;
    private gallery: GalleryState | null = null;
    private inFlight = false;

    constructor(private readonly api: ApiClient) {}

    get currentSession(): SessionDoc | null {
        return this.session;
    }

    get currentGallery(): GalleryState | null {
        return this.gallery;
    }

    private async mutate<T>(run: () => Promise<T>): Promise<T> {
        // at most one in-flight mutation per session
        if (this.inFlight) {
            throw new Error("another request is still in flight");
        }
        this.inFlight = true;
        try {
            return await run();
        } finally {
            this.inFlight = false;
        }
    }

    async submitIntent(state: IntentEditorState): Promise<SessionDoc> {
        const problems = validateIntent(state);
        if (problems.length) {
            throw new Error(problems[0]);
        }
        return this.mutate(async () => {
            this.session = await this.api.createSession(
                serializeIntent(state),
            );
            this.gallery = galleryFromSession(this.session);
            return this.session;
        });
    }

    async chooseCandidate(
        effectId: string,
        w?: number,
    ): Promise<SessionDoc> {
        if (!this.session || !this.gallery) {
            throw new Error("no active session");
        }
        // validates the selection against the presented candidates
        this.gallery = selectCandidate(this.gallery, effectId);
        return this.mutate(async () => {
            this.session = await this.api.select(
                this.session!.id,
                effectId,
                w,
            );
            this.gallery = galleryFromSession(this.session);
            return this.session;
        });
    }

    async composeArtwork(
        name: string,
        items: ArtworkItemPayload[],
    ): Promise<unknown> {
        if (!this.session) {
            throw new Error("no active session");
        }
        return this.mutate(async () => {
            const created = await this.api.composeArtwork(
                name,
                this.session!.id,
                items,
            );
            return this.api.exportArtwork(created.artwork_id);
        });
    }
}

/** Flat log of what each round presented, for replay comparisons. */
export function sessionLog(session: SessionDoc): {
    mode: string;
    presented: string[];
    selected: string | null;
}[] {
    return session.rounds.map((r) => ({
        mode: r.mode,
        presented: [...r.presented],
        selected: r.selected,
    }));
}
