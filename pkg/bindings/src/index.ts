/** Batch bindings over the sphergeo core for detector-training pipelines.
 *
 * Boxes travel as flat Float64Array buffers, N rows of
 * (lon, lat, fovH, fovV) degrees; results come back as flat buffers too.
 * Every function is a thin shim over the core CLI and is bit-exact with
 * the core library's own calls.  No state is kept between calls, so the
 * functions are safe to invoke from concurrent workers.
 */

import { join } from "node:path";

import { BatchBoxes, rowCount, toRows } from "./boxes.js";
import { coreVersion, readText, runCli, withTempDir, writeJson } from "./runner.js";

export { BatchBoxes, normalizeLon } from "./boxes.js";
export { coreVersion } from "./runner.js";

export const VERSION = "0.1.0";

export type IouMethod = "fov" | "sph" | "exact" | "mc";

export interface IouOptions {
  method?: IouMethod;
  samples?: number; // Monte-Carlo only
  seed?: number; // Monte-Carlo only
}

export interface BatchLossResult {
  /** Loss value per pair. */
  values: Float64Array;
  /** IoU term per pair (1 - loss + penalty). */
  iouTerms: Float64Array;
  /** Enclosure penalty per pair. */
  penalties: Float64Array;
  /** Row-major N x 4 partials w.r.t. (lon, lat, fovH, fovV), per degree. */
  gradients: Float64Array;
  /** True where the loss sat exactly on a min/max tie. */
  atKink: boolean[];
}

/** Full pairwise IoU matrix, row-major (rows = a, cols = b). */
export function iouMatrix(
  a: BatchBoxes,
  b: BatchBoxes,
  options: IouOptions = {},
): Float64Array {
  const rowsA = toRows(a);
  const rowsB = toRows(b);
  if (rowsA.length === 0 || rowsB.length === 0) return new Float64Array(0);
  const method = options.method ?? "fov";
  return withTempDir((dir) => {
    const fileA = writeJson(dir, "a.json", rowsA);
    const fileB = writeJson(dir, "b.json", rowsB);
    const out = join(dir, "matrix.csv");
    const args = [
      "iou", "--a", fileA, "--b", fileB,
      "--method", method, "--precision", "17", "--out", out,
    ];
    if (options.samples !== undefined) {
      args.push("--samples", String(options.samples));
    }
    if (options.seed !== undefined) args.push("--seed", String(options.seed));
    runCli(args);
    const lines = readText(out).trim().split("\n");
    const values = new Float64Array(rowsA.length * rowsB.length);
    lines.forEach((line, i) => {
      line.split(",").forEach((cell, j) => {
        values[i * rowsB.length + j] = Number(cell);
      });
    });
    return values;
  });
}

/** Pairwise FoV-IoU matrix (the recentred rectangle approximation). */
export function batchFovIou(a: BatchBoxes, b: BatchBoxes): Float64Array {
  return iouMatrix(a, b, { method: "fov" });
}

/** Pairwise Sph-IoU matrix (the raw lon/lat approximation). */
export function batchSphIou(a: BatchBoxes, b: BatchBoxes): Float64Array {
  return iouMatrix(a, b, { method: "sph" });
}

function batchLoss(
  a: BatchBoxes,
  b: BatchBoxes,
  kind: "fov" | "sph",
): BatchLossResult {
  const rowsA = toRows(a);
  const rowsB = toRows(b);
  if (rowsA.length !== rowsB.length) {
    throw new Error(
      `loss needs aligned pairs, got ${rowsA.length} vs ${rowsB.length} rows`,
    );
  }
  const n = rowsA.length;
  const result: BatchLossResult = {
    values: new Float64Array(n),
    iouTerms: new Float64Array(n),
    penalties: new Float64Array(n),
    gradients: new Float64Array(n * 4),
    atKink: new Array(n).fill(false),
  };
  if (n === 0) return result;
  return withTempDir((dir) => {
    const fileA = writeJson(dir, "a.json", rowsA);
    const fileB = writeJson(dir, "b.json", rowsB);
    const out = join(dir, "loss.json");
    runCli(["loss", "--a", fileA, "--b", fileB, "--kind", kind, "--out", out]);
    const rows = JSON.parse(readText(out)) as Array<{
      value: number;
      iou_term: number;
      enclosure_penalty: number;
      gradient: number[];
      at_kink: boolean;
    }>;
    rows.forEach((row, i) => {
      result.values[i] = row.value;
      result.iouTerms[i] = row.iou_term;
      result.penalties[i] = row.enclosure_penalty;
      result.gradients.set(row.gradient, i * 4);
      result.atKink[i] = row.at_kink;
    });
    return result;
  });
}

/** GIoU-style loss (FoV-distance variant) and gradients for aligned pairs:
 * ground-truth boxes in `a`, detected boxes in `b`. */
export function batchFovGiouLoss(a: BatchBoxes, b: BatchBoxes): BatchLossResult {
  return batchLoss(a, b, "fov");
}

/** GIoU-style loss (raw lon/lat variant) and gradients for aligned pairs. */
export function batchSphGiouLoss(a: BatchBoxes, b: BatchBoxes): BatchLossResult {
  return batchLoss(a, b, "sph");
}

/** Greedy NMS over one image's single-category detections.
 *
 * Returns the kept indices into the input buffers, in descending-score
 * order (score ties keep input order, matching the core).
 */
export function batchNms(
  boxes: BatchBoxes,
  scores: Float64Array | number[],
  iouThreshold: number,
  method: IouMethod = "fov",
): number[] {
  const rows = toRows(boxes);
  if (rows.length !== scores.length) {
    throw new Error(
      `nms needs one score per box, got ${rows.length} boxes vs ` +
        `${scores.length} scores`,
    );
  }
  scores.forEach?.((s: number, i: number) => {
    if (!(s >= 0 && s <= 1)) {
      throw new Error(`score row ${i}: ${s} outside [0, 1]`);
    }
  });
  if (rows.length === 0) return [];
  return withTempDir((dir) => {
    const det = writeJson(dir, "det.json", {
      format: "bfov/1",
      predictions: rows.map((bbox, i) => ({
        image_id: 1,
        category_id: 1,
        bbox,
        score: scores[i],
      })),
    });
    const out = join(dir, "kept.json");
    runCli([
      "nms", "--det", det, "--iou-thr", String(iouThreshold),
      "--method", method, "--out", out,
    ]);
    const kept = JSON.parse(readText(out)) as {
      predictions: Array<{ bbox: number[]; score: number }>;
    };
    // Identify kept rows by exact (score, normalized bbox) equality; the
    // round trip is bit-exact, so first-unused matching recovers indices
    // even among duplicates.
    const used = new Array(rows.length).fill(false);
    return kept.predictions.map((p) => {
      for (let i = 0; i < rows.length; i++) {
        if (used[i] || scores[i] !== p.score) continue;
        if (rows[i].every((v, k) => v === p.bbox[k])) {
          used[i] = true;
          return i;
        }
      }
      throw new Error("kept detection does not match any input row");
    });
  });
}

/** True when the installed core's version matches this binding. */
export function versionsMatch(): boolean {
  return coreVersion() === VERSION;
}
