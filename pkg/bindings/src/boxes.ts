/** Flat box buffers: N rows of (lon, lat, fovH, fovV) in degrees. */

export type BatchBoxes = Float64Array | number[];

/** Normalize a longitude into [-180, 180), bit-identical to the core. */
export function normalizeLon(lon: number): number {
  let r = (lon + 180.0) % 360.0; // JS % keeps the dividend's sign
  if (r < 0.0) r += 360.0;
  return r - 180.0;
}

export function rowCount(boxes: BatchBoxes): number {
  if (boxes.length % 4 !== 0) {
    throw new Error(`box buffer length ${boxes.length} is not a multiple of 4`);
  }
  return boxes.length / 4;
}

/** Validate every row and return it as [lon, lat, fovH, fovV] tuples with
 * the longitude normalized the way the core normalizes it. */
export function toRows(boxes: BatchBoxes): number[][] {
  const n = rowCount(boxes);
  const rows: number[][] = [];
  for (let i = 0; i < n; i++) {
    const lon = boxes[i * 4];
    const lat = boxes[i * 4 + 1];
    const fovH = boxes[i * 4 + 2];
    const fovV = boxes[i * 4 + 3];
    for (const v of [lon, lat, fovH, fovV]) {
      if (!Number.isFinite(v)) {
        throw new Error(`box row ${i}: non-finite field`);
      }
    }
    if (lat < -90 || lat > 90) {
      throw new Error(`box row ${i}: latitude ${lat} outside [-90, 90]`);
    }
    if (!(fovH > 0 && fovH < 180)) {
      throw new Error(`box row ${i}: fov_h ${fovH} outside (0, 180)`);
    }
    if (!(fovV > 0 && fovV < 180)) {
      throw new Error(`box row ${i}: fov_v ${fovV} outside (0, 180)`);
    }
    rows.push([normalizeLon(lon), lat, fovH, fovV]);
  }
  return rows;
}
