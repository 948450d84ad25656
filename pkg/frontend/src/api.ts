/**
 * Typed client for the exploration service HTTP API.
 *
 * Every mutation flows through here; the UI keeps no exploration state of
 * its own beyond what the service echoes back, so sessions stay replayable
 * server-side.
 */

export interface TransformationDoc {
    axis_reorientation: string;
    scale: number;
    duration_scale: number;
}

export interface RankedResultDoc {
    effect_id: string;
    similarity: number;
    best_transformation: TransformationDoc;
    kinematic_distance: number | null;
}

export interface RoundDoc {
    mode: string;
    presented: string[];
    selected: string | null;
    results: RankedResultDoc[];
}

export interface SessionDoc {
    id: string;
    w: number;
    intent_text: string | null;
    rounds: RoundDoc[];
    selections: string[];
    current_mode: string;
}

export interface PreviewSample {
    particle_id: number;
    birth_time: number;
    t: number;
    position: [number, number, number];
    size: number;
}

export interface PreviewDoc {
    effect_id: string;
    duration?: number;
    samples: PreviewSample[];
}

export interface StrokePayload {
    points: [number, number][];
    spiral_rate: number;
}

export interface GraphicalPayload {
    shape: { s: string; r: number; h?: number };
    strokes: StrokePayload[];
    duration: number;
}

export interface CreateSessionPayload {
    text?: string;
    graphical?: GraphicalPayload;
    w?: number;
}

export interface ArtworkItemPayload {
    effect_id: string;
    placement?: TransformationDoc;
    start_delay?: number;
    playback_speed?: number;
}

export interface ApiErrorBody {
    code: string;
    message: string;
    field?: string | null;
}

export class ServiceError extends Error {
    constructor(
        readonly status: number,
        readonly body: ApiErrorBody,
    ) {
        super(body.message);
    }
}

export type FetchLike = (
    input: string,
    init?: RequestInit,
) => Promise<Response>;

export class ApiClient {
    constructor(
        private readonly baseUrl: string,
        private readonly fetchImpl: FetchLike = (input, init) =>
            fetch(input, init),
    ) {}

    private async request<T>(
        method: string,
        path: string,
        body?: unknown,
    ): Promise<T> {
        const init: RequestInit = { method };
        if (body !== undefined) {
            init.headers = { "content-type": "application/json" };
            init.body = JSON.stringify(body);
        }
        const resp = await this.fetchImpl(this.baseUrl + path, init);
        const doc = await resp.json();
        if (!resp.ok) {
            throw new ServiceError(resp.status, doc as ApiErrorBody);
        }
        return doc as T;
    }

    createSession(payload: CreateSessionPayload): Promise<SessionDoc> {
        return this.request("POST", "/sessions", payload);
    }

    getSession(sessionId: string): Promise<SessionDoc> {
        return this.request("GET", `/sessions/${sessionId}`);
    }

    select(
        sessionId: string,
        effectId: string,
        w?: number,
    ): Promise<SessionDoc> {
        const body: { effect_id: string; w?: number } = { effect_id: effectId };
        if (w !== undefined) {
            body.w = w;
        }
        return this.request("POST", `/sessions/${sessionId}/select`, body);
    }

    preview(effectId: string, max = 64): Promise<PreviewDoc> {
        return this.request(
            "GET",
            `/effects/${effectId}/preview?max=${max}`,
        );
    }

    composeArtwork(
        name: string,
        sessionId: string | null,
        items: ArtworkItemPayload[],
    ): Promise<{ artwork_id: string; export: unknown }> {
        return this.request("POST", "/artworks", {
            name,
            session_id: sessionId,
            items,
        });
    }

    exportArtwork(artworkId: string): Promise<unknown> {
        return this.request("GET", `/artworks/${artworkId}/export`);
    }
}
