import { spawnSync } from "node:child_process";

export const FRAME_SEPARATOR = "\f";

export interface TraceOptions {
  expression?: string;
  file?: string;
  prelude?: string;
  style?: "unicode" | "ascii";
  durationMs?: number;
  fps?: number;
  maxSteps?: number;
  command?: string[];
  env?: NodeJS.ProcessEnv;
}

export interface TraceBundle {
  snapshots: string[];      // attributed static render per snapshot
  stepFrames: string[][];   // attributed morph frames per step
  truncated: boolean;
  notice: string;           // stderr of a truncated run
}

export function frameCount(durationMs: number, fps: number): number {
  return Math.ceil((durationMs * fps) / 1000) + 1;
}

/** Snapshot blocks of a `steps` run: blocks separated by blank lines.
 *  Rendered blocks never contain an empty line, so the split is safe. */
export function splitBlocks(stdout: string): string[] {
  const body = stdout.endsWith("\n") ? stdout.slice(0, -1) : stdout;
  return body === "" ? [] : body.split("\n\n");
}

/** Frames of a `frames` run, split on the form-feed separators. */
export function splitFrames(stdout: string): string[] {
  const body = stdout.endsWith("\n") ? stdout.slice(0, -1) : stdout;
  return body === "" ? [] : body.split("\n" + FRAME_SEPARATOR + "\n");
}

export function chunkSteps(frames: string[], perStep: number): string[][] {
  if (frames.length % perStep !== 0) {
    throw new Error(
      `frame stream of ${frames.length} is not a multiple of ${perStep}`);
  }
  const steps: string[][] = [];
  for (let at = 0; at < frames.length; at += perStep) {
    steps.push(frames.slice(at, at + perStep));
  }
  return steps;
}

/** A plain render carries no fades: every glyph cell is normal, every
 *  space invisible.  Lifts it to the attributed frame format. */
export function plainToAttributed(block: string): string {
  return block
    .split("\n")
    .map((line) => {
      const attrs = [...line].map((ch) => (ch === " " ? "i" : "n")).join("");
      return attrs + "|" + line;
    })
    .join("\n");
}

function inputFlags(options: TraceOptions): string[] {
  const flags: string[] = [];
  if (options.expression !== undefined) flags.push("-e", options.expression);
  else if (options.file !== undefined) flags.push("-f", options.file);
  else throw new Error("an expression or a file is required");
  if (options.prelude !== undefined) flags.push("-p", options.prelude);
  if (options.style !== undefined) flags.push("--style", options.style);
  if (options.maxSteps !== undefined) {
    flags.push("--max-steps", String(options.maxSteps));
  }
  return flags;
}

function run(options: TraceOptions, args: string[]) {
  const command = options.command ?? ["boxstep"];
  const result = spawnSync(command[0], [...command.slice(1), ...args], {
    encoding: "utf8",
    env: options.env ?? process.env,
    maxBuffer: 64 * 1024 * 1024,
  });
  if (result.error) throw result.error;
  if (result.status !== 0 && result.status !== 2) {
    throw new Error(result.stderr.trim() || `exit code ${result.status}`);
  }
  return result;
}

/** Loads everything the player needs with two CLI runs: the static
 *  renders from `steps --render` and the morph frames from `frames`. */
export function loadTrace(options: TraceOptions): TraceBundle {
  const durationMs = options.durationMs ?? 700;
  const fps = options.fps ?? 30;
  const flags = inputFlags(options);

  const steps = run(options, ["steps", ...flags, "--render"]);
  const snapshots = splitBlocks(steps.stdout).map(plainToAttributed);

  const frames = run(options, [
    "frames", ...flags,
    "--fps", String(fps),
    "--duration-ms", String(durationMs),
  ]);
  const stepFrames = chunkSteps(splitFrames(frames.stdout),
                                frameCount(durationMs, fps));

  const truncated = steps.status === 2;
  return {
    snapshots,
    stepFrames,
    truncated,
    notice: truncated ? steps.stderr.trim() : "",
  };
}
