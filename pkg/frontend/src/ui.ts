import { BUTTONS, NEXT, PLAY_PAUSE, UiState } from "./keys.js";
import type { FramePlayer } from "./player.js";

export interface Size {
  columns: number;
  rows: number;
}

const RESET = "[0m";
const DIM = "[2m";
const FAINT = "[2;90m";
const INVERSE = "[7m";

export function colorEnabled(env: NodeJS.ProcessEnv = process.env): boolean {
  return env.NO_COLOR === undefined || env.NO_COLOR === "";
}

/** One frame line is `attrs|glyphs` with one attribute letter per cell:
 *  n normal, d dim, f faint, i invisible.  Renders to the glyphs with
 *  SGR runs, or the bare glyphs when attributes are off. */
export function frameLine(line: string, color: boolean): string {
  const split = line.indexOf("|");
  const attrs = line.slice(0, split);
  const glyphs = line.slice(split + 1);
  if (!color) return glyphs;
  let out = "";
  let current = "";
  for (let i = 0; i < glyphs.length; i++) {
    const wanted = attrs[i] === "d" ? DIM : attrs[i] === "f" ? FAINT : "";
    if (wanted !== current) {
      if (current !== "") out += RESET;
      out += wanted;
      current = wanted;
    }
    out += glyphs[i];
  }
  if (current !== "") out += RESET;
  return out;
}

export function frameLines(frame: string, color: boolean): string[] {
  return frame.split("\n").map((line) => frameLine(line, color));
}

/** Cell width of a rendered line, ignoring escape sequences. */
export function visibleWidth(line: string): number {
  return [...line.replace(/\[[0-9;]*m/g, "")].length;
}

function pad(line: string, width: number): string {
  return line + " ".repeat(Math.max(0, width - visibleWidth(line)));
}

export interface ButtonLook {
  label: string;
  focused: boolean;
  disabled: boolean;
}

export function buttonLooks(state: UiState): ButtonLook[] {
  const done = state.player.atFixpoint();
  return BUTTONS.map((label, i) => ({
    label,
    focused: i === state.focus,
    disabled: done && (i === PLAY_PAUSE || i === NEXT),
  }));
}

/** The control bar: five buttons, each in its own border, side by side. */
export function controlBar(state: UiState, color: boolean): string[] {
  const tops: string[] = [];
  const mids: string[] = [];
  const bottoms: string[] = [];
  for (const look of buttonLooks(state)) {
    const width = [...look.label].length + 2;
    let label = ` ${look.label} `;
    if (color && look.disabled) label = DIM + label + RESET;
    else if (color && look.focused) label = INVERSE + label + RESET;
    tops.push("╭" + "─".repeat(width) + "╮");
    mids.push("│" + label + "│");
    bottoms.push("╰" + "─".repeat(width) + "╯");
  }
  return [tops.join(" "), mids.join(" "), bottoms.join(" ")];
}

/** Whole screen: the current frame above the control bar and message
 *  line, all inside one border. */
export function render(state: UiState, size: Size, color: boolean): string[] {
  const player = state.player as FramePlayer;
  const view = frameLines(player.currentFrame(), color);
  const bar = controlBar(state, color);
  const message = state.message;

  const content = [...view, "", ...bar, message];
  const inner = Math.max(...content.map(visibleWidth));
  const width = inner + 4;
  const height = content.length + 2;
  if (width > size.columns || height > size.rows) {
    return ["window too small"];
  }
  const lines = ["╭" + "─".repeat(width - 2) + "╮"];
  for (const line of content) {
    lines.push("│ " + pad(line, inner) + " │");
  }
  lines.push("╰" + "─".repeat(width - 2) + "╯");
  return lines;
}
