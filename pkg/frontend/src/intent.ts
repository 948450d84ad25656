/**
 * Intent editor state: semantic text, emission shape controls, trail
 * strokes drawn in the meridian plane, plus the duration and weight
 * sliders. Serializes to exactly the create-session payload and parses the
 * same document back, so a service echo re-renders identically.
 */

import type { CreateSessionPayload, GraphicalPayload } from "./api.js";

export type ShapeKind = "circle" | "cylinder" | "sphere";

export interface ShapeControl {
    kind: ShapeKind;
    radius: number;
    height: number; // cylinder only
}

export interface StrokeDraft {
    /** Polyline in the meridian plane: x = equatorial, y = polar axis. */
    points: [number, number][];
    /** Rotation around the polar axis, radians per second. */
    spiralRate: number;
}

export interface IntentEditorState {
    text: string;
    useGraphical: boolean;
    shape: ShapeControl;
    strokes: StrokeDraft[];
    duration: number;
    weight: number;
}

export const DURATION_RANGE: [number, number] = [0.1, 10.0];

export function defaultIntent(): IntentEditorState {
    return {
        text: "",
        useGraphical: false,
        shape: { kind: "circle", radius: 0.5, height: 0.0 },
        strokes: [],
        duration: 1.0,
        weight: 0.5,
    };
}

/** Absent-component rule mirrored client-side: one-sided intents pin w. */
export function effectiveWeight(state: IntentEditorState): number {
    const hasText = state.text.trim().length > 0;
    if (!hasText) {
        return 0.0;
    }
    if (!state.useGraphical) {
        return 1.0;
    }
    return state.weight;
}

export function weightControlEnabled(state: IntentEditorState): boolean {
    return state.text.trim().length > 0 && state.useGraphical;
}

function strokeArcLength(points: [number, number][]): number {
    let total = 0;
    for (let i = 1; i < points.length; i++) {
        total += Math.hypot(
            points[i][0] - points[i - 1][0],
            points[i][1] - points[i - 1][1],
        );
    }
    return total;
}

/**
 * Equal-arc-length resampling of a drawn polyline to n + 1 points,
 * mirroring how the engine consumes strokes; used for display so the local
 * rendering matches the echoed trail.
 */
export function resampleStroke(
    points: [number, number][],
    n: number,
): [number, number][] {
    if (points.length < 2) {
        return [];
    }
    const total = strokeArcLength(points);
    if (total === 0) {
        return Array.from({ length: n + 1 }, () => [
            points[0][0],
            points[0][1],
        ]);
    }
    const out: [number, number][] = [[points[0][0], points[0][1]]];
    let segment = 1;
    let coveredBefore = 0;
    for (let i = 1; i <= n; i++) {
        const target = (total * i) / n;
        while (segment < points.length - 1) {
            const length = Math.hypot(
                points[segment][0] - points[segment - 1][0],
                points[segment][1] - points[segment - 1][1],
            );
            if (coveredBefore + length >= target - 1e-12) {
                break;
            }
            coveredBefore += length;
            segment++;
        }
        const a = points[segment - 1];
        const b = points[segment];
        const length = Math.hypot(b[0] - a[0], b[1] - a[1]);
        const f = length === 0 ? 0 : (target - coveredBefore) / length;
        out.push([a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])]);
    }
    return out;
}

export function validateIntent(state: IntentEditorState): string[] {
    const problems: string[] = [];
    if (!state.text.trim() && !state.useGraphical) {
        problems.push("enter a description or enable the shape editor");
    }
    if (state.useGraphical) {
        if (
            state.duration < DURATION_RANGE[0] ||
            state.duration > DURATION_RANGE[1]
        ) {
            problems.push(
                `duration must lie in [${DURATION_RANGE[0]}, ` +
                    `${DURATION_RANGE[1]}] seconds`,
            );
        }
        if (state.shape.radius <= 0) {
            problems.push("shape radius must be positive");
        }
        for (const stroke of state.strokes) {
            if (stroke.points.length < 2 && stroke.spiralRate === 0) {
                problems.push("a stroke needs at least 2 points or spiral");
            }
        }
    }
    return problems;
}

export function serializeIntent(
    state: IntentEditorState,
): CreateSessionPayload {
    const payload: CreateSessionPayload = {};
    if (state.text.trim()) {
        payload.text = state.text;
    }
    if (state.useGraphical) {
        const shape: GraphicalPayload["shape"] = {
            s: state.shape.kind,
            r: state.shape.radius,
        };
        if (state.shape.kind === "cylinder") {
            shape.h = state.shape.height;
        }
        payload.graphical = {
            shape,
            strokes: state.strokes.map((s) => ({
                points: s.points.map(
                    (p) => [p[0], p[1]] as [number, number],
                ),
                spiral_rate: s.spiralRate,
            })),
            duration: state.duration,
        };
    }
    payload.w = effectiveWeight(state);
    return payload;
}

/** Inverse of serializeIntent, for echo/round-trip rendering. */
export function parseIntent(payload: CreateSessionPayload): IntentEditorState {
    const state = defaultIntent();
    state.text = payload.text ?? "";
    if (payload.graphical) {
        state.useGraphical = true;
        state.shape = {
            kind: payload.graphical.shape.s as ShapeKind,
            radius: payload.graphical.shape.r,
            height: payload.graphical.shape.h ?? 0.0,
        };
        state.strokes = payload.graphical.strokes.map((s) => ({
            points: s.points.map((p) => [p[0], p[1]] as [number, number]),
            spiralRate: s.spiral_rate,
        }));
        state.duration = payload.graphical.duration;
    }
    state.weight = payload.w ?? 0.5;
    return state;
}
