// Payload shapes of the gateway API; field names match the scenario schema.

export type PouchState = "jammed" | "compliant" | "transitional" | "non_everted";

export interface JointInfo {
  pouch: number;
  angle_rad: number;
  locked: boolean;
}

export interface Snapshot {
  revision: number;
  time_s: number;
  carriage_x_m: number;
  everted_m: number;
  pressure_pa: number;
  pitch_m: number;
  pouch_states: PouchState[];
  joints: JointInfo[];
  retraction: { left_m: number; right_m: number };
  shape: [number, number][];
}

export interface ActionDoc {
  action: string;
  [field: string]: unknown;
}

export interface SpecDoc {
  radius_m?: number;
  length_m?: number;
  num_pouches?: number;
  pressure_pa?: number;
  initial_everted_m?: number;
  [field: string]: unknown;
}

export interface PlanResponse {
  script: ActionDoc[];
  predicted: [number, number][];
  residual_m: number;
  angles_rad: number[];
}

export interface SessionHandle {
  id: string;
  snapshot: Snapshot;
}
