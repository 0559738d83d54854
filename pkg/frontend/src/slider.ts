export type SliderChangeHandler = (lower: number, upper: number) => void;

const STEP = 0.05;

function clamp01(v: number): number {
  return Math.min(1, Math.max(0, v));
}

/** Two-handle range control for the liberal-share bounds.
 *
 * Built from two overlaid range inputs. The control itself guarantees
 * lower <= upper: dragging one handle past the other pins it at the
 * other's value. Every input event reports the current pair through
 * onChange; debouncing and server calls live with the caller.
 */
export class ConstraintSlider {
  private readonly lowerInput: HTMLInputElement;
  private readonly upperInput: HTMLInputElement;
  private readonly label: HTMLElement;

  constructor(
    root: HTMLElement,
    lower: number,
    upper: number,
    private readonly onChange: SliderChangeHandler,
  ) {
    root.classList.add("constraint-slider");

    this.label = document.createElement("div");
    this.label.className = "slider-label";
    root.appendChild(this.label);

    const track = document.createElement("div");
    track.className = "slider-track";
    this.lowerInput = this.makeHandle("lower");
    this.upperInput = this.makeHandle("upper");
    track.appendChild(this.lowerInput);
    track.appendChild(this.upperInput);
    root.appendChild(track);

    this.set(lower, upper);
  }

  private makeHandle(which: "lower" | "upper"): HTMLInputElement {
    const input = document.createElement("input");
    input.type = "range";
    input.min = "0";
    input.max = "1";
    input.step = String(STEP);
    input.dataset.handle = which;
    input.addEventListener("input", () => this.handleInput(which));
    return input;
  }

  private handleInput(which: "lower" | "upper"): void {
    let lower = clamp01(Number(this.lowerInput.value));
    let upper = clamp01(Number(this.upperInput.value));
    if (lower > upper) {
      // pin the dragged handle at the other one
      if (which === "lower") {
        lower = upper;
        this.lowerInput.value = String(lower);
      } else {
        upper = lower;
        this.upperInput.value = String(upper);
      }
    }
    this.updateLabel(lower, upper);
    this.onChange(lower, upper);
  }

  /** Programmatic positioning, used for server echoes and snap-back. */
  set(lower: number, upper: number): void {
    this.lowerInput.value = String(lower);
    this.upperInput.value = String(upper);
    this.updateLabel(lower, upper);
  }

  values(): { lower: number; upper: number } {
    return {
      lower: Number(this.lowerInput.value),
      upper: Number(this.upperInput.value),
    };
  }

  private updateLabel(lower: number, upper: number): void {
    const pct = (v: number) => `${Math.round(v * 100)}%`;
    this.label.textContent = `liberal share between ${pct(lower)} and ${pct(upper)}`;
  }
}
