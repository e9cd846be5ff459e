#!/usr/bin/env node
/**
 * medclip-plot convergence --spec <file.json> [--out <file.svg>]
 * medclip-plot bandit      --spec <file.json> [--out <file.svg>]
 *
 * Spec files are JSON; relative CSV paths resolve against the spec file's
 * directory. Exit codes: 0 ok, 2 bad input (spec or CSV schema).
 */

import { readFileSync, writeFileSync } from "node:fs";
import { dirname, resolve } from "node:path";

import { InputError } from "./csv.js";
import {
  BanditSpec,
  ConvergenceSpec,
  renderBandit,
  renderConvergence,
} from "./figures.js";

function loadSpec(path: string): ConvergenceSpec | BanditSpec {
  let raw: string;
  try {
    raw = readFileSync(path, "utf8");
  } catch {
    throw new InputError(`cannot read spec file: ${path}`);
  }
  let spec: any;
  try {
    spec = JSON.parse(raw);
  } catch (err) {
    throw new InputError(`spec file is not valid JSON: ${path}`);
  }
  const base = dirname(resolve(path));
  const fix = (inputs: any) => {
    if (!Array.isArray(inputs)) return;
    for (const inp of inputs) {
      if (typeof inp?.path === "string") {
        inp.path = resolve(base, inp.path);
      }
    }
  };
  fix(spec.inputs);
  fix(spec.regret);
  fix(spec.probability);
  if (typeof spec.output === "string") {
    spec.output = resolve(base, spec.output);
  }
  return spec;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  const flags = new Map<string, string>();
  for (let i = 0; i < rest.length; i += 2) {
    if (!rest[i]?.startsWith("--") || rest[i + 1] === undefined) {
      console.error(`bad arguments near '${rest[i] ?? ""}'`);
      return 2;
    }
    flags.set(rest[i].slice(2), rest[i + 1]);
  }
  const specPath = flags.get("spec");
  if (!command || !["convergence", "bandit"].includes(command) || !specPath) {
    console.error("usage: medclip-plot convergence|bandit --spec <file.json> [--out <file.svg>]");
    return 2;
  }
  try {
    const spec = loadSpec(specPath);
    const svg =
      command === "convergence"
        ? renderConvergence(spec as ConvergenceSpec)
        : renderBandit(spec as BanditSpec);
    const out = flags.get("out") ?? spec.output;
    if (!out) {
      throw new InputError("no output path: set --out or the spec's 'output' field");
    }
    writeFileSync(out, svg);
    console.log(out);
    return 0;
  } catch (err) {
    if (err instanceof InputError) {
      console.error(`input error: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

if (process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "")) {
  process.exit(main(process.argv.slice(2)));
}
