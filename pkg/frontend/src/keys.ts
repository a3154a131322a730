import type { Playable } from "./player.js";

export const BUTTONS = ["▮◀◀", "▮◀", "▶",
                        "▶▮", "▶▶▮"] as const;

export const REWIND = 0;
export const BACK = 1;
export const PLAY_PAUSE = 2;
export const NEXT = 3;
export const FAST_FORWARD = 4;

export interface UiState {
  player: Playable;
  focus: number;            // 0..4, one of the control bar buttons
  message: string;
  notice: string;           // shown when the trace was cut off early
  quit: boolean;
  needsRedraw: boolean;
  lastTick: number | null;
}

export function initialState(player: Playable, notice = ""): UiState {
  return {
    player,
    focus: PLAY_PAUSE,
    message: notice,
    notice,
    quit: false,
    needsRedraw: true,
    lastTick: null,
  };
}

/** A decoded terminal key: readline's key names plus the raw sequence. */
export interface KeyEvent {
  name?: string;
  sequence?: string;
  ctrl?: boolean;
}

export function activate(state: UiState, button: number): void {
  const player = state.player;
  state.message = "";
  switch (button) {
    case REWIND:
      player.rewind();
      break;
    case BACK:
      player.back();
      break;
    case PLAY_PAUSE:
      if (player.playing()) player.pause();
      else player.play();
      break;
    case NEXT:
      if (player.atFixpoint()) {
        state.message = "normal form";
        return;
      }
      player.next();
      break;
    case FAST_FORWARD:
      if (!player.fastForward()) {
        state.message = state.notice || "stopped before a fixpoint";
      }
      break;
  }
}

/** Key to Playable routing: Home rewind, arrows step, Space toggles
 *  play/pause, End fast-forwards, Tab moves focus, Enter presses the
 *  focused button, q quits.  Anything else is ignored. */
export function dispatch(state: UiState, key: KeyEvent): void {
  const name = key.ctrl && key.name === "c" ? "quit"
    : key.name ?? key.sequence;
  switch (name) {
    case "right":
      activate(state, NEXT);
      break;
    case "left":
      activate(state, BACK);
      break;
    case "space":
    case " ":
      activate(state, PLAY_PAUSE);
      break;
    case "home":
      activate(state, REWIND);
      break;
    case "end":
      activate(state, FAST_FORWARD);
      break;
    case "tab":
      state.focus = (state.focus + 1) % BUTTONS.length;
      break;
    case "return":
    case "enter":
      activate(state, state.focus);
      break;
    case "q":
    case "quit":
      state.quit = true;
      break;
    default:
      return;
  }
  state.needsRedraw = true;
}

/** Clock callback: the first call anchors the clock, later ones feed
 *  the measured gap to the player and request a redraw while the
 *  animation is still running. */
export function tick(state: UiState, now: number): void {
  if (state.lastTick === null) {
    state.lastTick = now;
    return;
  }
  const dt = now - state.lastTick;
  state.lastTick = now;
  if (state.player.advance(dt)) {
    state.needsRedraw = true;
  }
}
