// Single source of truth for the demo's color language: liberal links
// blue, conservative links red; dashboard curves gold (unfiltered) and
// orange (balanced) between black constraint lines. Applied as inline
// styles so the rendered DOM carries the colors, not just class names.

export const TYPE_COLORS: Record<string, string> = {
  liberal: "#1a56c4",
  conservative: "#c42a1a",
};

export const FALLBACK_TYPE_COLOR = "#444444";

export const CURVE_UNFILTERED = "gold";
export const CURVE_BALANCED = "darkorange";
export const CURVE_BOUND = "black";

export function colorForType(typeName: string): string {
  return TYPE_COLORS[typeName] ?? FALLBACK_TYPE_COLOR;
}
