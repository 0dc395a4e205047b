import type { PlanResponse } from "./types.js";

/** Goal polyline the operator clicks together, in world meters. */
export class GoalSketch {
  private points: [number, number][] = [];

  add(x: number, y: number): void {
    this.points.push([x, y]);
  }

  clear(): void {
    this.points = [];
  }

  get polyline(): [number, number][] {
    return this.points.map((p) => [...p] as [number, number]);
  }

  get ready(): boolean {
    return this.points.length >= 2;
  }
}

export function planNotice(plan: PlanResponse, toleranceM = 0.02): string {
  if (plan.script.length === 0) {
    return "no actions needed";
  }
  const within = plan.residual_m <= toleranceM ? "within" : "OVER";
  return `${plan.script.length} actions, predicted residual ` +
    `${plan.residual_m.toExponential(2)} m (${within} tolerance)`;
}
