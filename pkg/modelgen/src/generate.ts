// Corpus assembly: model.json + instances/NNNN.json + manifest.json in the
// engine's file formats.  Writing is deterministic: fixed key order, JSON
// shortest round-trip number encoding, one trailing newline.

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { genInstances } from "./instances.js";
import { GenSpec, ModelDoc, genNetwork } from "./network.js";

export interface Manifest {
  name: string;
  model: string;
  instances: string[];
  genspec: GenSpec;
}

export function generateCorpus(spec: GenSpec, outDir: string): Manifest {
  const model: ModelDoc = genNetwork(spec);
  const instances = genInstances(spec, model);

  mkdirSync(join(outDir, "instances"), { recursive: true });
  writeJson(join(outDir, "model.json"), model);
  const paths: string[] = [];
  instances.forEach((inst, i) => {
    const rel = `instances/${String(i).padStart(4, "0")}.json`;
    writeJson(join(outDir, rel), inst);
    paths.push(rel);
  });
  const manifest: Manifest = {
    name: model.name,
    model: "model.json",
    instances: paths,
    genspec: spec,
  };
  writeJson(join(outDir, "manifest.json"), manifest);
  return manifest;
}

function writeJson(path: string, doc: unknown): void {
  writeFileSync(path, JSON.stringify(doc) + "\n");
}
