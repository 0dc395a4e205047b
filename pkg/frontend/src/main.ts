// Browser wiring: paints scenes, maps operator gestures to gateway requests,
// and keeps a live snapshot subscription. All state shown originates in
// gateway snapshots; this file never mutates shapes locally.

import { GatewayClient, GatewayError } from "./client.js";
import { assertMonotone, ScriptRunner } from "./playback.js";
import { render, POUCH_COLORS, type Scene } from "./render.js";
import { GoalSketch, planNotice } from "./sketch.js";
import type { PlanResponse, Snapshot } from "./types.js";

const DEFAULT_SPEC = {
  radius_m: 0.043,
  length_m: 1.2,
  num_pouches: 8,
  pressure_pa: 6900.0,
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

class Console {
  private client: GatewayClient;
  private sessionId = "";
  private latest: Snapshot | null = null;
  private pendingPlan: PlanResponse | null = null;
  private sketch = new GoalSketch();
  private sketching = false;
  private executing = false;
  private revisions: number[] = [];
  private canvas = el<HTMLCanvasElement>("view");
  private status = el<HTMLSpanElement>("status");

  constructor(baseUrl: string) {
    this.client = new GatewayClient(baseUrl);
  }

  async start(): Promise<void> {
    const session = await this.client.createSession(DEFAULT_SPEC);
    this.sessionId = session.id;
    this.show(session.snapshot);
    this.subscribe();
    this.bindControls();
    this.say("session ready, click a pouch to toggle jamming");
  }

  private say(text: string): void {
    this.status.textContent = text;
  }

  private subscribe(): void {
    const ws = new WebSocket(this.client.eventsUrl(this.sessionId));
    ws.onmessage = (event: MessageEvent) => {
      const snapshot: Snapshot = JSON.parse(event.data);
      this.revisions.push(snapshot.revision);
      try {
        assertMonotone(this.revisions);
      } catch (err) {
        this.say(`event stream out of order: ${err}`);
      }
      this.show(snapshot);
    };
    ws.onclose = () => this.say("event stream closed");
  }

  private show(snapshot: Snapshot): void {
    this.latest = snapshot;
    const scene = render(snapshot, {
      width: this.canvas.width,
      height: this.canvas.height,
    });
    this.paint(scene);
    el<HTMLSpanElement>("clock").textContent = scene.labels.clock;
    el<HTMLSpanElement>("revision").textContent = String(scene.labels.revision);
    el<HTMLSpanElement>("pressure").textContent = scene.labels.pressure;
    this.paintPouchButtons(snapshot);
  }

  private paint(scene: Scene): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    if (!scene.ok) return;
    for (const band of scene.bands) {
      ctx.strokeStyle = band.color;
      ctx.lineWidth = 10;
      ctx.lineCap = "round";
      ctx.beginPath();
      band.points.forEach(([x, y], i) => (i ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
      ctx.stroke();
    }
    for (const joint of scene.joints) {
      ctx.fillStyle = joint.locked ? "#222" : "#b03030";
      ctx.beginPath();
      ctx.arc(joint.x, joint.y, 6, 0, 2 * Math.PI);
      ctx.fill();
    }
    if (scene.carriage) {
      ctx.fillStyle = "#25a244";
      ctx.fillRect(scene.carriage.x - 5, scene.carriage.y - 5, 10, 10);
    }
    if (this.sketch.ready || this.sketching) {
      ctx.strokeStyle = "#888";
      ctx.setLineDash([6, 4]);
      ctx.beginPath();
      this.sketch.polyline.forEach(([x, y], i) => {
        const px = this.worldToPx([x, y]);
        if (px) (i ? ctx.lineTo(px[0], px[1]) : ctx.moveTo(px[0], px[1]));
      });
      ctx.stroke();
      ctx.setLineDash([]);
    }
  }

  // sketching shares the robot's fitted transform so goals land in world meters
  private worldToPx(p: [number, number]): [number, number] | null {
    if (!this.latest) return null;
    const scene = render(this.latest, {
      width: this.canvas.width,
      height: this.canvas.height,
    });
    if (!scene.ok || this.latest.shape.length < 2) return null;
    const [w0, w1] = [this.latest.shape[0], this.latest.shape[1]];
    const [p0, p1] = [scene.polyline[0], scene.polyline[1]];
    const scale = Math.hypot(p1[0] - p0[0], p1[1] - p0[1]) /
      Math.max(Math.hypot(w1[0] - w0[0], w1[1] - w0[1]), 1e-12);
    return [p0[0] + (p[0] - w0[0]) * scale, p0[1] - (p[1] - w0[1]) * scale];
  }

  private pxToWorld(x: number, y: number): [number, number] | null {
    if (!this.latest) return null;
    const scene = render(this.latest, {
      width: this.canvas.width,
      height: this.canvas.height,
    });
    if (!scene.ok) return null;
    const [w0] = [this.latest.shape[0]];
    const p0 = scene.polyline[0];
    const w1 = this.latest.shape[this.latest.shape.length - 1];
    const p1 = scene.polyline[scene.polyline.length - 1];
    const scale = Math.hypot(p1[0] - p0[0], p1[1] - p0[1]) /
      Math.max(Math.hypot(w1[0] - w0[0], w1[1] - w0[1]), 1e-12);
    return [w0[0] + (x - p0[0]) / scale, w0[1] - (y - p0[1]) / scale];
  }

  private paintPouchButtons(snapshot: Snapshot): void {
    const bar = el<HTMLDivElement>("pouches");
    bar.innerHTML = "";
    snapshot.pouch_states.forEach((state, i) => {
      const button = document.createElement("button");
      button.textContent = `P${i}`;
      button.style.background = POUCH_COLORS[state];
      button.disabled = state === "non_everted" || this.executing;
      button.title = state;
      button.onclick = () => void this.togglePouch(i);
      bar.appendChild(button);
    });
  }

  private async togglePouch(i: number): Promise<void> {
    if (!this.latest) return;
    const action = this.latest.pouch_states[i] === "compliant"
      ? { action: "jam_pouch", pouch: i }
      : { action: "unjam_pouch", pouch: i };
    await this.apply(action);
  }

  private async apply(action: Record<string, unknown>): Promise<void> {
    try {
      await this.client.applyAction(this.sessionId, action as { action: string });
    } catch (err) {
      if (err instanceof GatewayError) {
        this.say(`rejected: ${err.message}`);
      } else {
        throw err;
      }
    }
  }

  private bindControls(): void {
    const pull = (side: "left" | "right") => {
      const slider = el<HTMLInputElement>(`pull-${side}`);
      const deltaM = Number(slider.value) / 1000;
      slider.value = "0";
      if (deltaM > 0) void this.apply({ action: "pull_cable", side, delta_m: deltaM });
    };
    el<HTMLInputElement>("pull-left").onchange = () => pull("left");
    el<HTMLInputElement>("pull-right").onchange = () => pull("right");
    el<HTMLButtonElement>("grow").onclick = () =>
      void this.apply({ action: "grow", delta_m: 0.15 });

    el<HTMLButtonElement>("sketch").onclick = () => {
      this.sketching = !this.sketching;
      if (this.sketching) this.sketch.clear();
      this.say(this.sketching ? "sketching: click goal points on the canvas"
                              : "sketch closed");
    };
    this.canvas.onclick = (event: MouseEvent) => {
      if (!this.sketching) return;
      const rect = this.canvas.getBoundingClientRect();
      const world = this.pxToWorld(event.clientX - rect.left, event.clientY - rect.top);
      if (world) this.sketch.add(world[0], world[1]);
      if (this.latest) this.show(this.latest);
    };

    el<HTMLButtonElement>("plan").onclick = () => void this.plan();
    el<HTMLButtonElement>("execute").onclick = () => void this.execute();
  }

  private async plan(): Promise<void> {
    if (!this.sketch.ready) {
      this.say("sketch at least two points first");
      return;
    }
    try {
      this.pendingPlan = await this.client.requestPlan(this.sessionId,
                                                       this.sketch.polyline);
      this.say(planNotice(this.pendingPlan));
    } catch (err) {
      this.say(`plan failed: ${err instanceof Error ? err.message : err}`);
    }
  }

  private async execute(): Promise<void> {
    if (!this.pendingPlan || this.executing) return;
    this.executing = true;
    try {
      const runner = new ScriptRunner(this.client, this.sessionId);
      await runner.run(this.pendingPlan.script, (_, i) =>
        this.say(`executing ${i + 1}/${this.pendingPlan!.script.length}`));
      this.say("plan executed");
    } finally {
      this.executing = false;
      this.pendingPlan = null;
    }
  }
}

const base = new URLSearchParams(location.search).get("gateway") ??
  "http://127.0.0.1:8732";
new Console(base).start().catch((err) => {
  document.body.insertAdjacentText("beforeend", `failed to start: ${err}`);
});
