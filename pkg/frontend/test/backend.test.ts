import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";
import {
  chunkSteps, frameCount, loadTrace, plainToAttributed, splitBlocks,
  splitFrames,
} from "../src/backend.js";

const SOURCE_DIR = fileURLToPath(new URL("../../src", import.meta.url));
const CLI = ["python3", "-m", "boxstep.cli"];
const ENV = { ...process.env, PYTHONPATH: SOURCE_DIR };

const CYCLING =
  "((lambda (y) ((lambda (x) (x x)) y)) (lambda (y) ((lambda (x) (x x)) y)))";

describe("stream parsing", () => {
  it("counts frames from the duration and rate", () => {
    expect(frameCount(700, 30)).toBe(22);
    expect(frameCount(1000, 30)).toBe(31);
    expect(frameCount(700, 60)).toBe(43);
    expect(frameCount(1, 1)).toBe(2);
  });

  it("splits snapshot blocks on blank lines", () => {
    expect(splitBlocks("a\nb\n\nc\n")).toEqual(["a\nb", "c"]);
    expect(splitBlocks("a\n")).toEqual(["a"]);
    expect(splitBlocks("")).toEqual([]);
  });

  it("splits frames on form feeds", () => {
    expect(splitFrames("f1\n\f\nf2\n\f\nf3\n")).toEqual(["f1", "f2", "f3"]);
    expect(splitFrames("")).toEqual([]);
  });

  it("chunks the frame stream per step", () => {
    expect(chunkSteps(["a", "b", "c", "d"], 2))
      .toEqual([["a", "b"], ["c", "d"]]);
    expect(() => chunkSteps(["a", "b", "c"], 2))
      .toThrow("frame stream of 3 is not a multiple of 2");
  });

  it("lifts a plain render to the attributed format", () => {
    expect(plainToAttributed("x y\n  z")).toBe("nin|x y\niin|  z");
  });
});

describe("trace loading", () => {
  it("wants an input", () => {
    expect(() => loadTrace({ command: CLI, env: ENV }))
      .toThrow("an expression or a file is required");
  });

  it("collects snapshots and one frame set per step", () => {
    const bundle = loadTrace({
      expression: "(+ 1 (* 2 3))",
      command: CLI,
      env: ENV,
      fps: 10,
      durationMs: 200,
    });
    expect(bundle.snapshots.length).toBe(3);
    expect(bundle.stepFrames.length).toBe(2);
    for (const frames of bundle.stepFrames) {
      expect(frames.length).toBe(frameCount(200, 10));
    }
    expect(bundle.stepFrames[0][0]).toBe(bundle.snapshots[0]);
    for (const line of bundle.snapshots[2].split("\n")) {
      expect(line).toMatch(/^[in]+\|/);
    }
    expect(bundle.truncated).toBe(false);
    expect(bundle.notice).toBe("");
  });

  it("passes the box style through", () => {
    const bundle = loadTrace({
      expression: "(car '(1 2))",
      command: CLI,
      env: ENV,
      style: "ascii",
      fps: 1,
      durationMs: 1,
    });
    expect(bundle.snapshots[0]).not.toContain("╭");
    expect(bundle.snapshots[0]).toContain("+");
  });

  it("flags a trace that was cut off early", () => {
    const bundle = loadTrace({
      expression: CYCLING,
      command: CLI,
      env: ENV,
      maxSteps: 8,
      fps: 1,
      durationMs: 1,
    });
    expect(bundle.snapshots.length).toBe(9);
    expect(bundle.stepFrames.length).toBe(8);
    expect(bundle.truncated).toBe(true);
    expect(bundle.notice).toContain("gave up after 8 steps");
  });

  it("surfaces evaluator failures", () => {
    expect(() => loadTrace({ expression: "(", command: CLI, env: ENV }))
      .toThrow(/parse error/);
  });
});
