import type { GatewayClient } from "./client.js";
import type { ActionDoc, Snapshot } from "./types.js";

export class RevisionRegression extends Error {}

export function assertMonotone(revisions: number[]): void {
  for (let i = 1; i < revisions.length; i++) {
    if (revisions[i] <= revisions[i - 1]) {
      throw new RevisionRegression(
        `revision went ${revisions[i - 1]} -> ${revisions[i]}`);
    }
  }
}

/** Applies a planned script action by action, checking revision monotonicity. */
export class ScriptRunner {
  constructor(private readonly client: GatewayClient,
              private readonly sessionId: string) {}

  async run(script: ActionDoc[],
            onStep?: (snapshot: Snapshot, index: number) => void): Promise<Snapshot[]> {
    const snapshots: Snapshot[] = [];
    const revisions: number[] = [];
    for (let i = 0; i < script.length; i++) {
      const snapshot = await this.client.applyAction(this.sessionId, script[i]);
      snapshots.push(snapshot);
      revisions.push(snapshot.revision);
      assertMonotone(revisions);
      onStep?.(snapshot, i);
    }
    return snapshots;
  }
}
