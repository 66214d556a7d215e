// Command line: genspec flags in, corpus directory out.
//
//   node dist/cli.js --arch 64,200,200,10 --activation sigmoid --scale 10 \
//       --seed 1 --count 100 --radius 0.001 --out corpus/

import { parseArgs } from "node:util";

import { generateCorpus } from "./generate.js";
import { ActivationName, GenSpec } from "./network.js";

function usage(): never {
  console.error(
    "usage: modelgen --arch W0,W1,...,WK --activation relu|sigmoid|tanh " +
      "--scale S --seed N --count N --radius R --out DIR " +
      "[--sat-fraction F] [--dead-fraction F] [--dead-bias B] " +
      "[--margin-min M] [--name NAME]"
  );
  process.exit(1);
}

export function main(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      arch: { type: "string" },
      activation: { type: "string" },
      scale: { type: "string", default: "10" },
      seed: { type: "string", default: "1" },
      count: { type: "string", default: "100" },
      radius: { type: "string", default: "0.001" },
      out: { type: "string" },
      "sat-fraction": { type: "string" },
      "dead-fraction": { type: "string" },
      "dead-bias": { type: "string" },
      "margin-min": { type: "string" },
      name: { type: "string" },
    },
  });

  if (!values.arch || !values.activation || !values.out) usage();
  const activation = values.activation as ActivationName;
  if (!["relu", "sigmoid", "tanh"].includes(activation)) usage();

  const spec: GenSpec = {
    architecture: values.arch.split(",").map((s) => parseInt(s, 10)),
    activation,
    scale: parseFloat(values.scale!),
    seed: parseInt(values.seed!, 10),
    instanceCount: parseInt(values.count!, 10),
    radius: parseFloat(values.radius!),
  };
  if (values["sat-fraction"]) spec.satFraction = parseFloat(values["sat-fraction"]);
  if (values["dead-fraction"]) spec.deadFraction = parseFloat(values["dead-fraction"]);
  if (values["dead-bias"]) spec.deadBias = parseFloat(values["dead-bias"]);
  if (values["margin-min"]) spec.marginMin = parseFloat(values["margin-min"]);
  if (values.name) spec.name = values.name;

  const manifest = generateCorpus(spec, values.out);
  console.log(
    `wrote ${manifest.model} and ${manifest.instances.length} instances to ${values.out}`
  );
  return 0;
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
