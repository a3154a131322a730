import readline from "node:readline";
import { pathToFileURL } from "node:url";
import { loadTrace, TraceOptions } from "./backend.js";
import { dispatch, initialState, tick } from "./keys.js";
import { FramePlayer, STEP_DURATION_MS } from "./player.js";
import { colorEnabled, render } from "./ui.js";

const TICK_MS = 1000 / 30;

function usage(): never {
  process.stderr.write(
    "usage: boxstep-tui (-e EXPR | -f FILE) [-p PRELUDE] " +
    "[--style unicode|ascii] [--duration-ms N]\n");
  process.exit(1);
}

export function parseArgs(argv: string[]): TraceOptions {
  const options: TraceOptions = {};
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const value = () => {
      i++;
      if (i >= argv.length) usage();
      return argv[i];
    };
    if (flag === "-e" || flag === "--expression") options.expression = value();
    else if (flag === "-f" || flag === "--file") options.file = value();
    else if (flag === "-p" || flag === "--prelude") options.prelude = value();
    else if (flag === "--style") {
      const style = value();
      if (style !== "unicode" && style !== "ascii") usage();
      options.style = style;
    } else if (flag === "--duration-ms") {
      const ms = Number(value());
      if (!Number.isInteger(ms) || ms < 1) usage();
      options.durationMs = ms;
    } else usage();
  }
  if (options.expression === undefined && options.file === undefined) usage();
  return options;
}

function main(): void {
  const options = parseArgs(process.argv.slice(2));
  let bundle;
  try {
    bundle = loadTrace(options);
  } catch (error) {
    process.stderr.write(`${error instanceof Error ? error.message : error}\n`);
    process.exit(1);
  }

  const player = new FramePlayer(bundle.snapshots, bundle.stepFrames, {
    stepDurationMs: options.durationMs ?? STEP_DURATION_MS,
    truncated: bundle.truncated,
  });
  const state = initialState(player, bundle.notice);
  const color = colorEnabled();
  const out = process.stdout;

  const cleanup = () => {
    clearInterval(timer);
    if (process.stdin.isTTY) process.stdin.setRawMode(false);
    process.stdin.pause();
    out.write("[?25h[?1049l");
  };

  const redraw = () => {
    const size = { columns: out.columns ?? 80, rows: out.rows ?? 24 };
    const lines = render(state, size, color);
    out.write("[H[2J" + lines.join("\n") + "\n");
    state.needsRedraw = false;
  };

  out.write("[?1049h[?25l");
  readline.emitKeypressEvents(process.stdin);
  if (process.stdin.isTTY) process.stdin.setRawMode(true);
  process.stdin.resume();

  process.stdin.on("keypress", (_chunk, key) => {
    dispatch(state, key ?? {});
    if (state.quit) {
      cleanup();
      process.exit(0);
    }
    if (state.needsRedraw) redraw();
  });

  const timer = setInterval(() => {
    tick(state, performance.now());
    if (state.needsRedraw) redraw();
  }, TICK_MS);

  out.on("resize", () => {
    state.needsRedraw = true;
  });
  process.on("SIGINT", () => {
    cleanup();
    process.exit(0);
  });

  redraw();
}

if (process.argv[1] !== undefined &&
    import.meta.url === pathToFileURL(process.argv[1]).href) {
  main();
}
