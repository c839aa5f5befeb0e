import * as path from "node:path";
import { describe, expect, it } from "vitest";
import { CsvError, parseGrid, readGrid } from "../src/csv";

const SECTION = [
  "# command=distribution-section",
  "# config.sigma=0.001",
  "# mode=section",
  "x_minus,x_plus,re,im,ok",
  "0.1,1.2,3.5,0,1",
  "0.2,1.2,-1.25,0.5,0",
].join("\n");

describe("parseGrid", () => {
  it("parses section grids with metadata", () => {
    const grid = parseGrid(SECTION);
    expect(grid.mode).toBe("section");
    expect(grid.metadata["config.sigma"]).toBe("0.001");
    expect(grid.metadata.command).toBe("distribution-section");
    expect(grid.points).toHaveLength(2);
    expect(grid.points[0]).toEqual(
      { x: 0.1, y: 1.2, re: 3.5, im: 0, ok: true });
    expect(grid.points[1].ok).toBe(false);
  });

  it("parses base grids", () => {
    const grid = parseGrid("x,y,re,im,mask\n0,0.5,1,2,1\n");
    expect(grid.mode).toBe("base");
    expect(grid.points[0].im).toBe(2);
  });

  it("rejects unknown headers", () => {
    expect(() => parseGrid("a,b,c\n1,2,3\n")).toThrow(CsvError);
  });

  it("rejects non-numeric cells", () => {
    expect(() => parseGrid("x,y,re,im,mask\n0,0.5,oops,2,1\n"))
      .toThrow(/malformed data row/);
  });

  it("rejects short rows and bad flags", () => {
    expect(() => parseGrid("x,y,re,im,mask\n0,0.5,1\n")).toThrow(CsvError);
    expect(() => parseGrid("x,y,re,im,mask\n0,0.5,1,2,3\n"))
      .toThrow(/mask flag/);
  });

  it("rejects empty inputs", () => {
    expect(() => parseGrid("# only=metadata\n")).toThrow(CsvError);
    expect(() => parseGrid("x,y,re,im,mask\n")).toThrow(/no data rows/);
  });
});

describe("readGrid", () => {
  it("reads the bundled artifact fixture", () => {
    const grid = readGrid(
      path.join(__dirname, "fixtures", "section.csv"));
    expect(grid.mode).toBe("section");
    expect(grid.points).toHaveLength(81);
    expect(grid.metadata["config.grid.mode"]).toBe("level1");
    expect(grid.points.every((p) => p.ok)).toBe(true);
  });

  it("raises CsvError for missing files", () => {
    expect(() => readGrid("/nonexistent/grid.csv")).toThrow(CsvError);
  });
});
