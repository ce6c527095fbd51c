// Spacebar variant cycling with a ghost preview. The enumeration always
// comes from the service; the cycler only steps through it and wraps.

export class VariantCycler<T> {
  private idx = 0;

  constructor(private readonly variants: readonly T[]) {}

  get blocked(): boolean {
    return this.variants.length === 0;
  }

  get length(): number {
    return this.variants.length;
  }

  get index(): number {
    return this.idx;
  }

  current(): T {
    if (this.blocked) {
      throw new Error("no variants to cycle");
    }
    return this.variants[this.idx];
  }

  next(): T {
    if (this.blocked) {
      throw new Error("no variants to cycle");
    }
    this.idx = (this.idx + 1) % this.variants.length;
    return this.variants[this.idx];
  }
}

export interface GhostDescriptor {
  // free-form variant payload rendered onto the ghost element
  [key: string]: unknown;
}

export class GhostPreview {
  readonly element: HTMLElement;

  constructor(parent: HTMLElement) {
    this.element = document.createElement("div");
    this.element.className = "ghost-preview";
    parent.appendChild(this.element);
  }

  apply(index: number, variant: GhostDescriptor): void {
    this.element.dataset.variantIndex = String(index);
    this.element.dataset.variant = JSON.stringify(variant);
  }

  blockedMessage(message: string): void {
    this.element.dataset.variantIndex = "";
    this.element.textContent = message;
    this.element.classList.add("blocked");
  }

  remove(): void {
    this.element.remove();
  }
}

/**
 * Placement ghost driven by the spacebar: wraps through the service-provided
 * enumeration, or blocks placement with a message when it is empty.
 */
export class PlacementGhost<T extends GhostDescriptor> {
  readonly cycler: VariantCycler<T>;
  readonly ghost: GhostPreview;

  constructor(parent: HTMLElement, variants: readonly T[]) {
    this.cycler = new VariantCycler(variants);
    this.ghost = new GhostPreview(parent);
    if (this.cycler.blocked) {
      this.ghost.blockedMessage("no admissible placement variants");
    } else {
      this.ghost.apply(this.cycler.index, this.cycler.current());
    }
  }

  get blocked(): boolean {
    return this.cycler.blocked;
  }

  cycle(): void {
    if (this.cycler.blocked) return;
    const variant = this.cycler.next();
    this.ghost.apply(this.cycler.index, variant);
  }

  dispose(): void {
    this.ghost.remove();
  }
}
