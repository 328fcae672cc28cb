/** Keyboard mapping for the review queue (pure; DOM wiring lives in main). */

export type KeyAction =
  | { kind: "label"; label: "relevant" | "irrelevant" }
  | { kind: "move"; delta: number }
  | { kind: "undo" }
  | { kind: "submit" };

export function mapKey(key: string): KeyAction | null {
  switch (key) {
    case "r":
    case "R":
      return { kind: "label", label: "relevant" };
    case "i":
    case "I":
      return { kind: "label", label: "irrelevant" };
    case "j":
    case "ArrowDown":
      return { kind: "move", delta: 1 };
    case "k":
    case "ArrowUp":
      return { kind: "move", delta: -1 };
    case "u":
    case "U":
      return { kind: "undo" };
    case "Enter":
    case "s":
    case "S":
      return { kind: "submit" };
    default:
      return null;
  }
}
