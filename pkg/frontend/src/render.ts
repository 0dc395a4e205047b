// Pure scene construction: snapshot in, drawable primitives out. The canvas
// painter in main.ts only walks the scene, so everything here is testable
// headless and the UI can never invent state the gateway didn't send.

import type { PouchState, Snapshot } from "./types.js";

export interface Viewport {
  width: number;
  height: number;
  margin?: number;
}

export interface PouchBand {
  pouch: number;
  state: PouchState;
  color: string;
  points: [number, number][]; // pixel polyline slice
}

export interface JointMarker {
  pouch: number;
  x: number;
  y: number;
  angleDeg: number;
  locked: boolean;
}

export interface Scene {
  ok: boolean;
  polyline: [number, number][];
  bands: PouchBand[];
  joints: JointMarker[];
  carriage: { x: number; y: number } | null;
  labels: { clock: string; revision: number; pressure: string; everted: string };
}

export const POUCH_COLORS: Record<PouchState, string> = {
  jammed: "#4a6fa5",
  compliant: "#e8913a",
  transitional: "#d6c94f",
  non_everted: "#c9c9c9",
};

const EMPTY_SCENE: Scene = {
  ok: false,
  polyline: [],
  bands: [],
  joints: [],
  carriage: null,
  labels: { clock: "-", revision: -1, pressure: "-", everted: "-" },
};

function isFinitePair(p: unknown): p is [number, number] {
  return Array.isArray(p) && p.length === 2 &&
    Number.isFinite(p[0]) && Number.isFinite(p[1]);
}

function cumulativeLengths(shape: [number, number][]): number[] {
  const cum = [0];
  for (let i = 1; i < shape.length; i++) {
    const dx = shape[i][0] - shape[i - 1][0];
    const dy = shape[i][1] - shape[i - 1][1];
    cum.push(cum[i - 1] + Math.hypot(dx, dy));
  }
  return cum;
}

export function pointAtArc(shape: [number, number][], cum: number[],
                           s: number): [number, number] {
  const total = cum[cum.length - 1];
  const target = Math.min(Math.max(s, 0), total);
  let i = cum.findIndex((c) => c >= target);
  if (i <= 0) return [...shape[0]];
  const span = cum[i] - cum[i - 1];
  const t = span < 1e-12 ? 0 : (target - cum[i - 1]) / span;
  return [
    shape[i - 1][0] + t * (shape[i][0] - shape[i - 1][0]),
    shape[i - 1][1] + t * (shape[i][1] - shape[i - 1][1]),
  ];
}

function sliceByArc(shape: [number, number][], cum: number[],
                    s0: number, s1: number): [number, number][] {
  const out: [number, number][] = [pointAtArc(shape, cum, s0)];
  for (let i = 0; i < shape.length; i++) {
    if (cum[i] > s0 + 1e-12 && cum[i] < s1 - 1e-12) out.push([...shape[i]]);
  }
  out.push(pointAtArc(shape, cum, s1));
  return out;
}

export function render(snapshot: Snapshot, viewport: Viewport): Scene {
  const shape = snapshot?.shape;
  if (!Array.isArray(shape) || shape.length < 2 || !shape.every(isFinitePair) ||
      !Array.isArray(snapshot.pouch_states) || !(snapshot.pitch_m > 0)) {
    return { ...EMPTY_SCENE };
  }

  const margin = viewport.margin ?? 24;
  let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
  for (const [x, y] of shape) {
    minX = Math.min(minX, x); maxX = Math.max(maxX, x);
    minY = Math.min(minY, y); maxY = Math.max(maxY, y);
  }
  const spanX = Math.max(maxX - minX, 0.05);
  const spanY = Math.max(maxY - minY, 0.05);
  const scale = Math.min((viewport.width - 2 * margin) / spanX,
                         (viewport.height - 2 * margin) / spanY);
  const toPx = ([x, y]: [number, number]): [number, number] => [
    margin + (x - minX) * scale,
    viewport.height - margin - (y - minY) * scale,
  ];

  const cum = cumulativeLengths(shape);
  const bodyLength = cum[cum.length - 1];
  // polyline arc length tracks the everted length; tiny mismatch from arc
  // sampling is absorbed by proportional rescaling
  const arcOf = (s: number) =>
    snapshot.everted_m > 0 ? (s / snapshot.everted_m) * bodyLength : 0;

  const bands: PouchBand[] = [];
  snapshot.pouch_states.forEach((state, i) => {
    const s0 = i * snapshot.pitch_m;
    const s1 = Math.min((i + 1) * snapshot.pitch_m, snapshot.everted_m);
    if (state === "non_everted" || s1 <= s0) return;
    bands.push({
      pouch: i,
      state,
      color: POUCH_COLORS[state] ?? POUCH_COLORS.non_everted,
      points: sliceByArc(shape, cum, arcOf(s0), arcOf(s1)).map(toPx),
    });
  });

  const joints: JointMarker[] = (snapshot.joints ?? [])
    .filter((j) => Math.abs(j.angle_rad) > 1e-6)
    .map((j) => {
      const [x, y] = toPx(pointAtArc(shape, cum, arcOf(j.pouch * snapshot.pitch_m)));
      return { pouch: j.pouch, x, y, angleDeg: (j.angle_rad * 180) / Math.PI,
               locked: j.locked };
    });

  const carriagePoint = toPx(pointAtArc(shape, cum, arcOf(snapshot.carriage_x_m)));

  return {
    ok: true,
    polyline: shape.map(toPx),
    bands,
    joints,
    carriage: { x: carriagePoint[0], y: carriagePoint[1] },
    labels: {
      clock: `${snapshot.time_s.toFixed(1)} s`,
      revision: snapshot.revision,
      pressure: `${(snapshot.pressure_pa / 1000).toFixed(1)} kPa`,
      everted: `${snapshot.everted_m.toFixed(2)} m`,
    },
  };
}
