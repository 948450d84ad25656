import { describe, expect, it } from "vitest";
import type { PreviewDoc, PreviewSample } from "../src/api.js";
import { PointSink, PreviewPlayer, SpritePoint } from "../src/preview.js";

class RecordingSink implements PointSink {
    frames: SpritePoint[][] = [];
    clears = 0;

    clear(): void {
        this.clears += 1;
    }

    drawPoints(points: SpritePoint[]): void {
        this.frames.push(points);
    }

    get last(): SpritePoint[] {
        return this.frames[this.frames.length - 1] ?? [];
    }
}

function sample(
    particleId: number,
    birth: number,
    t: number,
    position: [number, number, number],
): PreviewSample {
    return { particle_id: particleId, birth_time: birth, t, position, size: 0.05 };
}

function twoParticleDoc(): PreviewDoc {
    return {
        effect_id: "demo",
        duration: 1.0,
        samples: [
            sample(0, 0.0, 0.0, [0.5, 0, 0]),
            sample(0, 0.0, 0.5, [1.0, 0, 0]),
            sample(1, 0.25, 0.0, [0, 0.5, 0]),
            sample(1, 0.25, 0.5, [0, 1.0, 0]),
        ],
    };
}

describe("preview player", () => {
    it("renders an empty stream without crashing", () => {
        const sink = new RecordingSink();
        const player = new PreviewPlayer(sink);
        player.load({ effect_id: "empty", samples: [] });
        player.play();
        player.tick(0);
        player.tick(16);
        player.seek(0.5);
        expect(sink.last).toEqual([]);
        expect(player.duration).toBe(0);
    });

    it("shows birth positions when scrubbed to t=0", () => {
        const sink = new RecordingSink();
        const player = new PreviewPlayer(sink);
        player.load(twoParticleDoc());
        player.seek(0);
        // only the particle born at t=0 is alive, at its first sample
        expect(sink.last.length).toBe(1);
        expect(sink.last[0].x).toBeCloseTo(0.5, 12);
        expect(sink.last[0].y).toBeCloseTo(0, 12);
    });

    it("interpolates linearly between samples", () => {
        const sink = new RecordingSink();
        const player = new PreviewPlayer(sink);
        player.load(twoParticleDoc());
        const points = player.pointsAt(0.25);
        const first = points.find((p) => p.x > 0)!;
        expect(first.x).toBeCloseTo(0.75, 12);
        const second = points.find((p) => p.y > 0)!;
        expect(second.y).toBeCloseTo(0.5, 12);
    });

    it("drops particles past their lifetime", () => {
        const sink = new RecordingSink();
        const player = new PreviewPlayer(sink);
        player.load(twoParticleDoc());
        // at t=0.6 the first particle (born 0, lifetime 0.5) is gone
        const points = player.pointsAt(0.6);
        expect(points.length).toBe(1);
        expect(points[0].y).toBeGreaterThan(0);
    });

    it("traverses a 1 s effect in 0.5 s at 2x playback, within a frame", () => {
        const sink = new RecordingSink();
        const player = new PreviewPlayer(sink);
        player.load(twoParticleDoc());
        player.playbackSpeed = 2.0;
        player.play();
        const frameMs = 16;
        let wrapAt: number | null = null;
        let prev = player.time;
        for (let now = 0; now <= 1000; now += frameMs) {
            player.tick(now);
            if (wrapAt === null && player.time < prev) {
                wrapAt = now;
            }
            prev = player.time;
        }
        expect(wrapAt).not.toBeNull();
        expect(Math.abs(wrapAt! - 500)).toBeLessThanOrEqual(frameMs);
    });

    it("holds position while paused and resumes without jumping", () => {
        const sink = new RecordingSink();
        const player = new PreviewPlayer(sink);
        player.load(twoParticleDoc());
        player.play();
        player.tick(0);
        player.tick(100);
        expect(player.time).toBeCloseTo(0.1, 12);
        player.pause();
        player.tick(5000);
        expect(player.time).toBeCloseTo(0.1, 12);
        player.play();
        player.tick(6000); // first tick after resume only sets the clock
        player.tick(6100);
        expect(player.time).toBeCloseTo(0.2, 12);
    });

    it("clamps seek into [0, duration]", () => {
        const player = new PreviewPlayer(new RecordingSink());
        player.load(twoParticleDoc());
        player.seek(-3);
        expect(player.time).toBe(0);
        player.seek(42);
        expect(player.time).toBe(1.0);
    });
});
