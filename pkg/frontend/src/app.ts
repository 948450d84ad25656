/**
 * DOM wiring for the exploration client.
 *
 * Layout: intent editor (text, shape controls, stroke canvas, duration and
 * weight sliders) on the left, a 4-candidate gallery with animated previews
 * in the middle, and the artwork tray on the right. All state transitions
 * go through ExplorationClient; this file only renders.
 */

import { ApiClient, ArtworkItemPayload, ServiceError } from "./api.js";
import { PointSink, PreviewPlayer, SpritePoint } from "./preview.js";
import {
    IntentEditorState,
    defaultIntent,
    resampleStroke,
    weightControlEnabled,
} from "./intent.js";
import { ExplorationClient } from "./session.js";

const WORLD_EXTENT = 4; // meters mapped to the preview canvas half-width

function el<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (!node) {
        throw new Error(`missing element: ${id}`);
    }
    return node as T;
}

class CanvasSink implements PointSink {
    private readonly ctx: CanvasRenderingContext2D;

    constructor(private readonly canvas: HTMLCanvasElement) {
        const ctx = canvas.getContext("2d");
        if (!ctx) {
            throw new Error("2d canvas unavailable");
        }
        this.ctx = ctx;
    }

    clear(): void {
        this.ctx.fillStyle = "#10131a";
        this.ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);
    }

    drawPoints(points: SpritePoint[]): void {
        const cx = this.canvas.width / 2;
        const cy = this.canvas.height / 2;
        const pixelsPerMeter = this.canvas.width / (2 * WORLD_EXTENT);
        this.ctx.fillStyle = "#ffd479";
        for (const p of points) {
            // orthographic meridian view: screen x = x, screen y = -z
            const sx = cx + p.x * pixelsPerMeter;
            const sy = cy - p.z * pixelsPerMeter;
            const radius = Math.max(1, p.size * pixelsPerMeter);
            this.ctx.beginPath();
            this.ctx.arc(sx, sy, radius, 0, 2 * Math.PI);
            this.ctx.fill();
        }
    }
}

interface CandidateCard {
    root: HTMLElement;
    player: PreviewPlayer;
    effectId: string | null;
}

function buildCard(
    container: HTMLElement,
    onSelect: (effectId: string) => void,
): CandidateCard {
    const root = document.createElement("div");
    root.className = "card";
    const canvas = document.createElement("canvas");
    canvas.width = 220;
    canvas.height = 180;
    const label = document.createElement("div");
    label.className = "card-label";
    const controls = document.createElement("div");
    controls.className = "card-controls";
    const playBtn = document.createElement("button");
    playBtn.textContent = "play";
    const scrubber = document.createElement("input");
    scrubber.type = "range";
    scrubber.min = "0";
    scrubber.max = "1000";
    scrubber.value = "0";
    const speed = document.createElement("select");
    for (const s of ["0.5", "1", "2"]) {
        const option = document.createElement("option");
        option.value = s;
        option.textContent = `${s}x`;
        if (s === "1") {
            option.selected = true;
        }
        speed.appendChild(option);
    }
    const pickBtn = document.createElement("button");
    pickBtn.textContent = "select";
    pickBtn.className = "pick";
    controls.append(playBtn, scrubber, speed, pickBtn);
    root.append(label, canvas, controls);
    container.appendChild(root);

    const card: CandidateCard = {
        root,
        player: new PreviewPlayer(new CanvasSink(canvas)),
        effectId: null,
    };
    playBtn.addEventListener("click", () => {
        if (card.player.isPlaying) {
            card.player.pause();
            playBtn.textContent = "play";
        } else {
            card.player.play();
            playBtn.textContent = "pause";
        }
    });
    scrubber.addEventListener("input", () => {
        card.player.pause();
        playBtn.textContent = "play";
        const f = Number(scrubber.value) / 1000;
        card.player.seek(f * card.player.duration);
    });
    speed.addEventListener("change", () => {
        card.player.playbackSpeed = Number(speed.value);
    });
    pickBtn.addEventListener("click", () => {
        if (card.effectId) {
            onSelect(card.effectId);
        }
    });
    const frame = (now: number) => {
        card.player.tick(now);
        if (card.player.isPlaying && card.player.duration > 0) {
            scrubber.value = String(
                Math.round((card.player.time / card.player.duration) * 1000),
            );
        }
        requestAnimationFrame(frame);
    };
    requestAnimationFrame(frame);
    label.textContent = "empty";
    return card;
}

export function startApp(baseUrl: string): void {
    const api = new ApiClient(baseUrl);
    const client = new ExplorationClient(api);
    const intent: IntentEditorState = defaultIntent();
    const artworkItems: ArtworkItemPayload[] = [];

    const textInput = el<HTMLTextAreaElement>("intent-text");
    const useGraphical = el<HTMLInputElement>("use-graphical");
    const shapeKind = el<HTMLSelectElement>("shape-kind");
    const shapeRadius = el<HTMLInputElement>("shape-radius");
    const shapeHeight = el<HTMLInputElement>("shape-height");
    const spiralRate = el<HTMLInputElement>("spiral-rate");
    const durationSlider = el<HTMLInputElement>("duration");
    const weightSlider = el<HTMLInputElement>("weight");
    const strokeCanvas = el<HTMLCanvasElement>("stroke-canvas");
    const statusLine = el<HTMLElement>("status");
    const galleryBox = el<HTMLElement>("gallery");
    const trayList = el<HTMLElement>("tray");

    const strokeCtx = strokeCanvas.getContext("2d")!;
    const pixelsPerMeter = strokeCanvas.width / (2 * WORLD_EXTENT);

    function canvasToPlane(ev: MouseEvent): [number, number] {
        const rect = strokeCanvas.getBoundingClientRect();
        const px = ev.clientX - rect.left;
        const py = ev.clientY - rect.top;
        // x = equatorial offset, y = polar-axis offset, origin at center
        return [
            (px - strokeCanvas.width / 2) / pixelsPerMeter,
            (strokeCanvas.height / 2 - py) / pixelsPerMeter,
        ];
    }

    function drawStrokes(): void {
        strokeCtx.fillStyle = "#171b24";
        strokeCtx.fillRect(0, 0, strokeCanvas.width, strokeCanvas.height);
        strokeCtx.strokeStyle = "#6fa8ff";
        strokeCtx.lineWidth = 2;
        for (const stroke of intent.strokes) {
            const resampled = resampleStroke(stroke.points, 32);
            if (!resampled.length) {
                continue;
            }
            strokeCtx.beginPath();
            resampled.forEach(([x, y], i) => {
                const sx = strokeCanvas.width / 2 + x * pixelsPerMeter;
                const sy = strokeCanvas.height / 2 - y * pixelsPerMeter;
                if (i === 0) {
                    strokeCtx.moveTo(sx, sy);
                } else {
                    strokeCtx.lineTo(sx, sy);
                }
            });
            strokeCtx.stroke();
        }
    }

    function syncControls(): void {
        weightSlider.disabled = !weightControlEnabled(intent);
        shapeHeight.disabled = intent.shape.kind !== "cylinder";
        drawStrokes();
    }

    let drawing: [number, number][] | null = null;
    strokeCanvas.addEventListener("mousedown", (ev) => {
        drawing = [canvasToPlane(ev)];
    });
    strokeCanvas.addEventListener("mousemove", (ev) => {
        if (drawing) {
            drawing.push(canvasToPlane(ev));
            drawStrokes();
        }
    });
    window.addEventListener("mouseup", () => {
        if (drawing && drawing.length >= 2) {
            intent.strokes = [
                { points: drawing, spiralRate: Number(spiralRate.value) },
            ];
        }
        drawing = null;
        drawStrokes();
    });
    el<HTMLButtonElement>("clear-strokes").addEventListener("click", () => {
        intent.strokes = [];
        drawStrokes();
    });

    textInput.addEventListener("input", () => {
        intent.text = textInput.value;
        syncControls();
    });
    useGraphical.addEventListener("change", () => {
        intent.useGraphical = useGraphical.checked;
        syncControls();
    });
    shapeKind.addEventListener("change", () => {
        intent.shape.kind = shapeKind.value as IntentEditorState["shape"]["kind"];
        syncControls();
    });
    shapeRadius.addEventListener("input", () => {
        intent.shape.radius = Number(shapeRadius.value);
    });
    shapeHeight.addEventListener("input", () => {
        intent.shape.height = Number(shapeHeight.value);
    });
    durationSlider.addEventListener("input", () => {
        intent.duration = Number(durationSlider.value);
    });
    weightSlider.addEventListener("input", () => {
        intent.weight = Number(weightSlider.value);
    });

    const cards: CandidateCard[] = [];
    const onSelect = (effectId: string) => {
        client
            .chooseCandidate(effectId, weightControlEnabled(intent)
                ? Number(weightSlider.value)
                : undefined)
            .then(renderRound)
            .catch(showError);
    };
    for (let i = 0; i < 4; i++) {
        cards.push(buildCard(galleryBox, onSelect));
    }

    function showError(err: unknown): void {
        if (err instanceof ServiceError) {
            const where = err.body.field ? ` (${err.body.field})` : "";
            statusLine.textContent = `error: ${err.body.message}${where}`;
        } else {
            statusLine.textContent = `error: ${String(err)}`;
        }
    }

    function renderRound(): void {
        const gallery = client.currentGallery;
        if (!gallery) {
            return;
        }
        statusLine.textContent =
            `round ${gallery.round} (${gallery.mode} exploration)`;
        cards.forEach((card, i) => {
            const candidate = gallery.candidates[i];
            const label = card.root.querySelector(".card-label")!;
            if (!candidate) {
                card.effectId = null;
                label.textContent = "empty";
                card.player.load({ effect_id: "", samples: [] });
                return;
            }
            card.effectId = candidate.effect_id;
            label.textContent =
                `${candidate.effect_id} ` +
                `(${candidate.similarity.toFixed(3)})`;
            api.preview(candidate.effect_id, 48)
                .then((doc) => {
                    if (card.effectId === candidate.effect_id) {
                        card.player.load(doc);
                        card.player.play();
                    }
                })
                .catch(() => {
                    label.textContent += " [preview failed, click select to retry]";
                });
        });
    }

    el<HTMLButtonElement>("submit-intent").addEventListener("click", () => {
        client.submitIntent(intent).then(renderRound).catch(showError);
    });

    el<HTMLButtonElement>("add-to-artwork").addEventListener("click", () => {
        const gallery = client.currentGallery;
        if (!gallery?.selection) {
            statusLine.textContent = "select a candidate first";
            return;
        }
        artworkItems.push({
            effect_id: gallery.selection,
            start_delay: artworkItems.length * 0.5,
        });
        const li = document.createElement("li");
        li.textContent = gallery.selection;
        trayList.appendChild(li);
    });

    el<HTMLButtonElement>("export-artwork").addEventListener("click", () => {
        client
            .composeArtwork("artwork", artworkItems)
            .then((doc) => {
                const blob = new Blob([JSON.stringify(doc, null, 2)], {
                    type: "application/json",
                });
                const a = document.createElement("a");
                a.href = URL.createObjectURL(blob);
                a.download = "artwork.json";
                a.click();
            })
            .catch(showError);
    });

    syncControls();
}
