/** Spawns the sphergeo CLI and shuttles JSON/CSV through temp files.
 *
 * The binding talks to the core exclusively through its command line and
 * file formats; numbers cross the boundary as shortest round-trip decimal
 * strings, so parsed values are bit-exact with the core's doubles.
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

let cachedCommand: string[] | null = null;

function cliCommand(): string[] {
  if (cachedCommand) return cachedCommand;
  const override = process.env.SPHERGEO_BIN;
  const candidates: string[][] = override
    ? [override.split(" ")]
    : [["sphergeo"], ["python3", "-m", "sphergeo.cli"]];
  for (const cand of candidates) {
    const probe = spawnSync(cand[0], [...cand.slice(1), "--version"], {
      encoding: "utf-8",
    });
    if (probe.status === 0) {
      cachedCommand = cand;
      return cand;
    }
  }
  throw new Error(
    "sphergeo CLI not found; install the core package or set SPHERGEO_BIN",
  );
}

export function runCli(args: string[]): string {
  const cmd = cliCommand();
  const result = spawnSync(cmd[0], [...cmd.slice(1), ...args], {
    encoding: "utf-8",
    maxBuffer: 1 << 28,
  });
  if (result.error) throw result.error;
  if (result.status !== 0) {
    throw new Error(
      `sphergeo ${args[0]} failed (exit ${result.status}): ${result.stderr.trim()}`,
    );
  }
  return result.stdout;
}

/** Core version string, via `sphergeo --version`. */
export function coreVersion(): string {
  const out = runCli(["--version"]).trim();
  return out.split(/\s+/).pop() ?? out;
}

export function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "sphergeo-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

export function writeJson(dir: string, name: string, doc: unknown): string {
  const path = join(dir, name);
  writeFileSync(path, JSON.stringify(doc), "utf-8");
  return path;
}

export function readText(path: string): string {
  return readFileSync(path, "utf-8");
}
