// Network synthesis in the verification engine's model JSON schema, plus the
// generator's own forward pass (the engine cross-checks it through its CLI).

import { Rng, choice, gaussian, mulberry32, uniform } from "./rng.js";

export type ActivationName = "relu" | "sigmoid" | "tanh";

export interface GenSpec {
  /** Widths including input and output, e.g. [64, 200, 200, 10]. */
  architecture: number[];
  activation: ActivationName;
  /** Saturation control: magnitude of the aligned biases that pin sigmoid or
   *  tanh neurons; at 10 and above, at least 90% of hidden pre-activations
   *  exceed |4| on random inputs. */
  scale: number;
  seed: number;
  instanceCount: number;
  radius: number;
  /** Share of neurons per hidden layer given a saturating bias. */
  satFraction?: number;
  /** Share of ReLU neurons per hidden layer forced dead (bias deadBias). */
  deadFraction?: number;
  deadBias?: number;
  /** Reject instance centers whose top-two logit margin is below this. */
  marginMin?: number;
  name?: string;
}

export interface LinearLayerDoc {
  type: "linear";
  weights: number[][];
  bias: number[];
}

export interface ActivationLayerDoc {
  type: "activation";
  kind: ActivationName;
}

export type LayerDoc = LinearLayerDoc | ActivationLayerDoc;

export interface ModelDoc {
  name: string;
  layers: LayerDoc[];
}

export interface InstanceDoc {
  center: number[];
  radius: number;
  label: number;
}

const round6 = (x: number) => Math.round(x * 1e6) / 1e6;

function matrix(rng: Rng, rows: number, cols: number, std: number): number[][] {
  const out: number[][] = [];
  for (let i = 0; i < rows; i++) {
    const row: number[] = [];
    for (let j = 0; j < cols; j++) row.push(round6(gaussian(rng) * std));
    out.push(row);
  }
  return out;
}

export function genNetwork(spec: GenSpec): ModelDoc {
  const arch = spec.architecture;
  if (arch.length < 3 || arch.some((w) => w < 1)) {
    throw new Error("architecture needs input, at least one hidden and output widths >= 1");
  }
  if (!(spec.scale > 0)) throw new Error("scale must be > 0");
  const rng = mulberry32(spec.seed);
  const satFraction = spec.satFraction ?? 0.93;
  const deadFraction = spec.deadFraction ?? 0;
  const deadBias = spec.deadBias ?? -10;

  const layers: LayerDoc[] = [];
  let prev = arch[0];
  for (let h = 1; h < arch.length - 1; h++) {
    const width = arch[h];
    const weights = matrix(rng, width, prev, 1 / Math.sqrt(prev));
    const bias: number[] = [];
    for (let i = 0; i < width; i++) {
      if (spec.activation === "relu") {
        if (rng() < deadFraction) {
          // Dead neuron: shrink its weights so the bias dominates everywhere.
          for (let j = 0; j < prev; j++) weights[i][j] = round6(weights[i][j] * 0.1);
          bias.push(round6(deadBias));
        } else {
          bias.push(round6(uniform(rng, 0, 1)));
        }
      } else if (rng() < satFraction) {
        bias.push(round6(choice(rng) * uniform(rng, 0.6 * spec.scale, 1.4 * spec.scale)));
      } else {
        bias.push(round6(gaussian(rng) * 0.5));
      }
    }
    layers.push({ type: "linear", weights, bias });
    layers.push({ type: "activation", kind: spec.activation });
    prev = width;
  }
  const out = arch[arch.length - 1];
  layers.push({
    type: "linear",
    weights: matrix(rng, out, prev, 2 / Math.sqrt(prev)),
    bias: new Array<number>(out).fill(0),
  });
  return { name: spec.name ?? `gen_${spec.activation}_${arch.join("x")}`, layers };
}

// ---------------------------------------------------------------------------
// Forward pass (dual implementation of the engine's eval, used for labels).

function act(kind: ActivationName, x: number): number {
  if (kind === "relu") return x > 0 ? x : 0;
  if (kind === "sigmoid") {
    if (x >= 0) return 1 / (1 + Math.exp(-x));
    const e = Math.exp(x);
    return e / (1 + e);
  }
  return Math.tanh(x);
}

export function forward(model: ModelDoc, x: number[]): number[] {
  let h = x.slice();
  for (const layer of model.layers) {
    if (layer.type === "linear") {
      const next: number[] = [];
      for (let i = 0; i < layer.weights.length; i++) {
        let acc = layer.bias[i];
        const row = layer.weights[i];
        for (let j = 0; j < row.length; j++) acc += row[j] * h[j];
        next.push(acc);
      }
      h = next;
    } else {
      h = h.map((v) => act(layer.kind, v));
    }
  }
  return h;
}

export function argmax(values: number[]): number {
  let best = 0;
  for (let i = 1; i < values.length; i++) if (values[i] > values[best]) best = i;
  return best;
}

/** Pre-activation values of every hidden layer (saturation diagnostics). */
export function hiddenPreActivations(model: ModelDoc, x: number[]): number[][] {
  const pres: number[][] = [];
  let h = x.slice();
  for (let li = 0; li < model.layers.length; li++) {
    const layer = model.layers[li];
    if (layer.type === "linear") {
      const next: number[] = [];
      for (let i = 0; i < layer.weights.length; i++) {
        let acc = layer.bias[i];
        const row = layer.weights[i];
        for (let j = 0; j < row.length; j++) acc += row[j] * h[j];
        next.push(acc);
      }
      if (li + 1 < model.layers.length && model.layers[li + 1].type === "activation") {
        pres.push(next);
      }
      h = next;
    } else {
      h = h.map((v) => act(layer.kind, v));
    }
  }
  return pres;
}
