/**
 * Gallery round state: the current candidates and the user's selection.
 * Selection is only ever one of the presented candidates; everything else
 * is a programming error surfaced early.
 */

import type { RankedResultDoc, SessionDoc } from "./api.js";

export interface GalleryState {
    round: number;
    mode: string;
    candidates: RankedResultDoc[];
    selection: string | null;
}

export function galleryFromSession(session: SessionDoc): GalleryState {
    const current = session.rounds[session.rounds.length - 1];
    return {
        round: session.rounds.length,
        mode: current.mode,
        candidates: current.results,
        selection: current.selected,
    };
}

export function selectCandidate(
    state: GalleryState,
    effectId: string,
): GalleryState {
    if (!state.candidates.some((c) => c.effect_id === effectId)) {
        throw new Error(`candidate not in the current round: ${effectId}`);
    }
    return { ...state, selection: effectId };
}

export function allPresented(session: SessionDoc): string[] {
    return session.rounds.flatMap((r) => r.presented);
}
