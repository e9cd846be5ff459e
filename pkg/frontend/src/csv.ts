/**
 * Strict readers for the experiment harness CSV schemas.
 *
 * Aggregate files: bucket,mean,std,p05,p95
 * Any header deviation is an input error naming the offending column.
 */

import { readFileSync } from "node:fs";

export const AGGREGATE_HEADER = ["bucket", "mean", "std", "p05", "p95"] as const;

export interface AggregateSeries {
  buckets: number[];
  mean: number[];
  std: number[];
  p05: number[];
  p95: number[];
}

export class InputError extends Error {}

export function parseAggregateCsv(text: string, source = "<csv>"): AggregateSeries {
  const lines = text.trim().split(/\r?\n/);
  if (lines.length < 2) {
    throw new InputError(`${source}: no data rows`);
  }
  const header = lines[0].split(",");
  for (let i = 0; i < AGGREGATE_HEADER.length; i++) {
    if (header[i] !== AGGREGATE_HEADER[i]) {
      throw new InputError(
        `${source}: expected column ${i + 1} to be '${AGGREGATE_HEADER[i]}', got '${header[i] ?? ""}'`,
      );
    }
  }
  if (header.length !== AGGREGATE_HEADER.length) {
    throw new InputError(`${source}: unexpected extra column '${header[AGGREGATE_HEADER.length]}'`);
  }
  const out: AggregateSeries = { buckets: [], mean: [], std: [], p05: [], p95: [] };
  for (const [rowIdx, line] of lines.slice(1).entries()) {
    const parts = line.split(",");
    if (parts.length !== AGGREGATE_HEADER.length) {
      throw new InputError(`${source}: row ${rowIdx + 2} has ${parts.length} fields`);
    }
    const nums = parts.map((p, col) => {
      const v = Number(p);
      if (!Number.isFinite(v)) {
        throw new InputError(
          `${source}: row ${rowIdx + 2}, column '${AGGREGATE_HEADER[col]}' is not a number: '${p}'`,
        );
      }
      return v;
    });
    out.buckets.push(nums[0]);
    out.mean.push(nums[1]);
    out.std.push(nums[2]);
    out.p05.push(nums[3]);
    out.p95.push(nums[4]);
  }
  return out;
}

export function readAggregateCsv(path: string): AggregateSeries {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new InputError(`cannot read CSV file: ${path}`);
  }
  return parseAggregateCsv(text, path);
}
