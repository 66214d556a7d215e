// Instance synthesis: centers uniform in [0, 1]^v0, labeled by the
// generator's own forward pass so every instance is correctly classified by
// construction.  Weak-margin draws are rejected (exact ties would make the
// label ill-defined).

import { GenSpec, InstanceDoc, ModelDoc, argmax, forward } from "./network.js";
import { mulberry32 } from "./rng.js";

export function genInstances(spec: GenSpec, model: ModelDoc): InstanceDoc[] {
  const v0 = spec.architecture[0];
  const marginMin = spec.marginMin ?? 1e-6;
  // Separate stream from the network weights: same seed, offset domain.
  const rng = mulberry32(spec.seed ^ 0x5eed);
  const round6 = (x: number) => Math.round(x * 1e6) / 1e6;

  const out: InstanceDoc[] = [];
  for (let i = 0; i < spec.instanceCount; i++) {
    let center: number[] | null = null;
    let label = 0;
    for (let tries = 0; tries < 200; tries++) {
      const candidate = Array.from({ length: v0 }, () => round6(rng()));
      const logits = forward(model, candidate);
      label = argmax(logits);
      const sorted = logits.slice().sort((a, b) => b - a);
      if (sorted[0] - sorted[1] >= marginMin) {
        center = candidate;
        break;
      }
    }
    if (center === null) {
      throw new Error(`instance ${i}: no center with margin >= ${marginMin} found`);
    }
    out.push({ center, radius: spec.radius, label });
  }
  return out;
}
