// Keyboard map: Space cycles variants, Enter confirms/advances, Esc cancels,
// F3 cycles the projection preset.

export interface KeyHandlers {
  onCycle?: () => void; // Space
  onConfirm?: () => void; // Enter
  onCancel?: () => void; // Escape
  onProjectionCycle?: () => void; // F3
}

export class KeyRouter {
  private handlers: KeyHandlers = {};
  private readonly listener: EventListener = (event) => {
    this.route(event as KeyboardEvent);
  };

  constructor(private readonly target: EventTarget) {}

  attach(): void {
    this.target.addEventListener("keydown", this.listener);
  }

  detach(): void {
    this.target.removeEventListener("keydown", this.listener);
  }

  setHandlers(handlers: KeyHandlers): void {
    this.handlers = handlers;
  }

  route(event: KeyboardEvent): boolean {
    switch (event.key) {
      case " ":
      case "Spacebar":
        if (this.handlers.onCycle) {
          event.preventDefault();
          this.handlers.onCycle();
          return true;
        }
        return false;
      case "Enter":
        if (this.handlers.onConfirm) {
          event.preventDefault();
          this.handlers.onConfirm();
          return true;
        }
        return false;
      case "Escape":
        if (this.handlers.onCancel) {
          event.preventDefault();
          this.handlers.onCancel();
          return true;
        }
        return false;
      case "F3":
        if (this.handlers.onProjectionCycle) {
          event.preventDefault();
          this.handlers.onProjectionCycle();
          return true;
        }
        return false;
      default:
        return false;
    }
  }
}
