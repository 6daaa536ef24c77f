import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { pngDimensions } from "../src/png.js";

const CLI = join(__dirname, "..", "dist", "cli.js");
const DATA = join(__dirname, "..", "testdata");

function run(args: string[]): number {
  try {
    execFileSync(process.execPath, [CLI, ...args], { stdio: "pipe" });
    return 0;
  } catch (err: any) {
    return err.status ?? -1;
  }
}

describe("plots CLI", () => {
  const dir = mkdtempSync(join(tmpdir(), "plots-"));

  it("renders both chart kinds from the golden CSVs", () => {
    const out1 = join(dir, "base.png");
    expect(
      run(["render", "--kind", "base-noise", "--in", join(DATA, "base_noise.csv"), "--out", out1]),
    ).toBe(0);
    expect(pngDimensions(readFileSync(out1)).width).toBeGreaterThan(0);

    const out2 = join(dir, "trace.png");
    expect(
      run(["render", "--kind", "error-trace", "--in", join(DATA, "error_trace.csv"), "--out", out2]),
    ).toBe(0);
    expect(pngDimensions(readFileSync(out2)).width).toBeGreaterThan(0);
  });

  it("rejects a malformed schema with exit 2", () => {
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "# not-the-schema\nt,series,mean_error\n1,a,2\n");
    expect(
      run(["render", "--kind", "error-trace", "--in", bad, "--out", join(dir, "x.png")]),
    ).toBe(2);
  });

  it("exits 1 on empty data", () => {
    const empty = join(dir, "empty.csv");
    writeFileSync(empty, "# contmech-v1\nt,series,mean_error\n");
    expect(
      run(["render", "--kind", "error-trace", "--in", empty, "--out", join(dir, "y.png")]),
    ).toBe(1);
  });

  it("exits 2 on usage errors", () => {
    expect(run(["render", "--kind", "error-trace"])).toBe(2);
    expect(run(["render", "--kind", "nope", "--in", "x", "--out", "y"])).toBe(2);
    expect(run(["frobnicate"])).toBe(2);
  });

  it("writes identical bytes on identical invocations", () => {
    const a = join(dir, "a.png");
    const b = join(dir, "b.png");
    for (const out of [a, b]) {
      expect(
        run(["render", "--kind", "base-noise", "--in", join(DATA, "base_noise_single.csv"), "--out", out]),
      ).toBe(0);
    }
    expect(readFileSync(a).equals(readFileSync(b))).toBe(true);
  });
});
