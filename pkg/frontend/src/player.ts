export const STEP_DURATION_MS = 700;

export type Mode = "idle" | "animating_forward" | "animating_backward" | "playing";

/** The operations the controls drive.  advance() is fed measured wall
 *  time and returns true while an animation is still running. */
export interface Playable {
  advance(timestepMs: number): boolean;
  next(): void;
  back(): void;
  play(): void;
  pause(): void;
  rewind(): void;
  fastForward(): boolean;
  playing(): boolean;
  atFixpoint(): boolean;
}

interface Animation {
  frames: string[];
  delta: 1 | -1;
}

export interface FramePlayerOptions {
  stepDurationMs?: number;
  truncated?: boolean;
}

/** Playback over pre-rendered material: one static frame per snapshot
 *  and, per step, the morph frames between two consecutive snapshots.
 *  Stepping back replays the same frames in reverse order. */
export class FramePlayer implements Playable {
  readonly snapshots: string[];
  readonly stepFrames: string[][];
  readonly truncated: boolean;

  index = 0;
  mode: Mode = "idle";
  private active: Animation | null = null;
  private elapsed = 0;
  private readonly stepDuration: number;

  constructor(snapshots: string[], stepFrames: string[][],
              options: FramePlayerOptions = {}) {
    if (stepFrames.length !== Math.max(0, snapshots.length - 1)) {
      throw new Error("one frame set per consecutive snapshot pair expected");
    }
    this.snapshots = snapshots;
    this.stepFrames = stepFrames;
    this.stepDuration = options.stepDurationMs ?? STEP_DURATION_MS;
    this.truncated = options.truncated ?? false;
  }

  currentFrame(): string {
    if (this.active !== null) {
      const frames = this.active.frames;
      const progress = Math.min(1, this.elapsed / this.stepDuration);
      return frames[Math.round(progress * (frames.length - 1))];
    }
    return this.snapshots[this.index];
  }

  playing(): boolean {
    return this.mode === "playing" || this.mode === "animating_forward";
  }

  atFixpoint(): boolean {
    return this.index === this.snapshots.length - 1;
  }

  private forwardAnimation(): Animation | null {
    if (this.index >= this.stepFrames.length) return null;
    return { frames: this.stepFrames[this.index], delta: 1 };
  }

  private backwardAnimation(): Animation | null {
    if (this.index === 0) return null;
    return { frames: [...this.stepFrames[this.index - 1]].reverse(), delta: -1 };
  }

  private commit(): void {
    if (this.active === null) return;
    this.index += this.active.delta;
    this.active = null;
    this.elapsed = 0;
  }

  private begin(animation: Animation, mode: Mode): void {
    this.active = animation;
    this.elapsed = 0;
    this.mode = mode;
  }

  advance(timestepMs: number): boolean {
    if (this.mode === "idle" || this.active === null) return false;
    this.elapsed += timestepMs;
    if (this.elapsed < this.stepDuration) return true;
    this.commit();
    if (this.mode === "playing") {
      const next = this.forwardAnimation();
      if (next !== null) {
        this.begin(next, "playing");
        return true;
      }
    }
    this.mode = "idle";
    return false;
  }

  next(): void {
    this.commit();
    const animation = this.forwardAnimation();
    if (animation === null) {
      this.mode = "idle";
      return;
    }
    this.begin(animation, "animating_forward");
  }

  back(): void {
    this.commit();
    const animation = this.backwardAnimation();
    if (animation === null) {
      this.mode = "idle";
      return;
    }
    this.begin(animation, "animating_backward");
  }

  play(): void {
    if (this.active !== null) {
      this.mode = "playing";
      return;
    }
    const animation = this.forwardAnimation();
    if (animation === null) {
      this.mode = "idle";
      return;
    }
    this.begin(animation, "playing");
  }

  pause(): void {
    this.mode = "idle";
  }

  rewind(): void {
    this.index = 0;
    this.mode = "idle";
    this.active = null;
    this.elapsed = 0;
  }

  fastForward(): boolean {
    this.index = this.snapshots.length - 1;
    this.mode = "idle";
    this.active = null;
    this.elapsed = 0;
    return !this.truncated;
  }
}
