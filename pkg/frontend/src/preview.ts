/**
 * Deterministic point-sprite preview player over a trajectory stream.
 *
 * Drawing goes through the small PointSink interface so the player logic is
 * testable without a canvas; app.ts supplies the 2D-canvas implementation.
 * Playback position is a pure function of (stream, playbackSpeed, elapsed
 * clock time), so rendering is deterministic given the stream.
 */

import type { PreviewDoc, PreviewSample } from "./api.js";

export interface SpritePoint {
    x: number;
    y: number;
    z: number;
    size: number;
}

export interface PointSink {
    clear(): void;
    drawPoints(points: SpritePoint[]): void;
}

interface Particle {
    birthTime: number;
    times: number[];
    positions: [number, number, number][];
    size: number;
}

function groupParticles(samples: PreviewSample[]): Particle[] {
    const byId = new Map<number, Particle>();
    for (const s of samples) {
        let p = byId.get(s.particle_id);
        if (!p) {
            p = {
                birthTime: s.birth_time,
                times: [],
                positions: [],
                size: s.size,
            };
            byId.set(s.particle_id, p);
        }
        p.times.push(s.t);
        p.positions.push(s.position);
    }
    return [...byId.values()];
}

function interpolate(p: Particle, age: number): [number, number, number] {
    const last = p.times.length - 1;
    if (age <= p.times[0]) {
        return p.positions[0];
    }
    if (age >= p.times[last]) {
        return p.positions[last];
    }
    let i = 1;
    while (p.times[i] < age) {
        i++;
    }
    const t0 = p.times[i - 1];
    const t1 = p.times[i];
    const f = t1 === t0 ? 0 : (age - t0) / (t1 - t0);
    const a = p.positions[i - 1];
    const b = p.positions[i];
    return [
        a[0] + f * (b[0] - a[0]),
        a[1] + f * (b[1] - a[1]),
        a[2] + f * (b[2] - a[2]),
    ];
}

export class PreviewPlayer {
    private particles: Particle[] = [];
    private lifetime = 0;
    private totalDuration = 0;
    private playing = false;
    private position = 0; // seconds of effect time
    private lastTick: number | null = null;
    playbackSpeed = 1.0;

    constructor(private readonly sink: PointSink) {}

    load(doc: PreviewDoc): void {
        this.particles = groupParticles(doc.samples);
        this.lifetime = this.particles.length
            ? Math.max(...this.particles.map((p) => p.times[p.times.length - 1]))
            : 0;
        this.totalDuration =
            doc.duration ??
            (this.particles.length
                ? Math.max(
                      ...this.particles.map((p) => p.birthTime),
                  ) + this.lifetime
                : 0);
        this.position = 0;
        this.playing = false;
        this.lastTick = null;
        this.render();
    }

    get duration(): number {
        return this.totalDuration;
    }

    get time(): number {
        return this.position;
    }

    get isPlaying(): boolean {
        return this.playing;
    }

    play(): void {
        this.playing = true;
        this.lastTick = null;
    }

    pause(): void {
        this.playing = false;
        this.lastTick = null;
    }

    /** Jump the scrubber to an effect time in [0, duration]. */
    seek(time: number): void {
        this.position = Math.min(Math.max(time, 0), this.totalDuration);
        this.render();
    }

    /** Advance using a wall-clock timestamp (ms), e.g. from rAF. */
    tick(nowMs: number): void {
        if (!this.playing) {
            return;
        }
        if (this.lastTick !== null) {
            const elapsed = (nowMs - this.lastTick) / 1000;
            this.position += elapsed * this.playbackSpeed;
            if (this.position >= this.totalDuration) {
                this.position = this.totalDuration > 0
                    ? this.position % this.totalDuration
                    : 0;
            }
            this.render();
        }
        this.lastTick = nowMs;
    }

    /** Alive particle positions at the current scrubber time. */
    pointsAt(time: number): SpritePoint[] {
        const out: SpritePoint[] = [];
        for (const p of this.particles) {
            const age = time - p.birthTime;
            if (age < 0 || age > this.lifetime) {
                continue;
            }
            const [x, y, z] = interpolate(p, age);
            out.push({ x, y, z, size: p.size });
        }
        return out;
    }

    private render(): void {
        this.sink.clear();
        this.sink.drawPoints(this.pointsAt(this.position));
    }
}
