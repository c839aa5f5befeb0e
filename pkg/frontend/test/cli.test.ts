import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { run } from "../src/cli";

const FIXTURE = path.join(__dirname, "fixtures", "section.csv");
let workDir: string;

beforeAll(() => {
  workDir = fs.mkdtempSync(path.join(os.tmpdir(), "plotrender-"));
});

afterAll(() => {
  fs.rmSync(workDir, { recursive: true, force: true });
});

describe("render command", () => {
  it("writes a PNG for a valid grid", async () => {
    const out = path.join(workDir, "fig.png");
    const code = await run(["render", "--in", FIXTURE,
                            "--style", "phase_lightness", "--out", out]);
    expect(code).toBe(0);
    const magic = fs.readFileSync(out).subarray(0, 8);
    expect([...magic]).toEqual([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a,
                                0x0a]);
  });

  it("exits nonzero on malformed CSV", async () => {
    const bad = path.join(workDir, "bad.csv");
    fs.writeFileSync(bad, "not,a,grid\n1,2\n");
    const code = await run(["render", "--in", bad,
                            "--style", "heatmap_re",
                            "--out", path.join(workDir, "bad.png")]);
    expect(code).not.toBe(0);
  });

  it("exits nonzero on a missing input file", async () => {
    const code = await run(["render", "--in",
                            path.join(workDir, "absent.csv"),
                            "--style", "heatmap_re",
                            "--out", path.join(workDir, "x.png")]);
    expect(code).not.toBe(0);
  });

  it("rejects unknown styles at argument parsing", async () => {
    const code = await run(["render", "--in", FIXTURE,
                            "--style", "rainbow",
                            "--out", path.join(workDir, "y.png")]);
    expect(code).not.toBe(0);
  });
});
