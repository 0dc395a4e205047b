import { describe, expect, it } from "vitest";

import { GoalSketch, planNotice } from "../src/sketch.js";
import { assertMonotone, RevisionRegression } from "../src/playback.js";
import type { PlanResponse } from "../src/types.js";

const emptyPlan: PlanResponse = {
  script: [], predicted: [], residual_m: 1e-12, angles_rad: [0, 0, 0, 0],
};

describe("sketch", () => {
  it("collects points and reports readiness", () => {
    const sketch = new GoalSketch();
    expect(sketch.ready).toBe(false);
    sketch.add(0, 0);
    sketch.add(0.45, 0);
    expect(sketch.ready).toBe(true);
    expect(sketch.polyline).toEqual([[0, 0], [0.45, 0]]);
    sketch.clear();
    expect(sketch.ready).toBe(false);
  });

  it("notices an empty plan", () => {
    expect(planNotice(emptyPlan)).toBe("no actions needed");
  });

  it("summarizes a real plan against the tolerance", () => {
    const plan: PlanResponse = {
      ...emptyPlan,
      script: [{ action: "unjam_pouch", pouch: 3 }],
      residual_m: 0.004,
    };
    expect(planNotice(plan)).toContain("1 actions");
    expect(planNotice(plan)).toContain("within");
    expect(planNotice(plan, 0.001)).toContain("OVER");
  });
});

describe("revision monotonicity", () => {
  it("accepts strictly increasing revisions", () => {
    expect(() => assertMonotone([1, 2, 5])).not.toThrow();
  });

  it("rejects stalls and regressions", () => {
    expect(() => assertMonotone([1, 1])).toThrow(RevisionRegression);
    expect(() => assertMonotone([3, 2])).toThrow(RevisionRegression);
  });
});
