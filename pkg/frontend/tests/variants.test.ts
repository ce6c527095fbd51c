// [SECONDARY acceptance] Variant cycling wraps: for a k-variant symbol the
// orientation ghost returns to frame 0 after k spacebar presses, driven
// through real keyboard events in the headless DOM.

import { describe, expect, it } from "vitest";

import { KeyRouter } from "../src/keyboard.js";
import { PlacementGhost, VariantCycler } from "../src/variants.js";
import fixtures from "./fixtures/service.json";

function press(key: string): void {
  document.dispatchEvent(new KeyboardEvent("keydown", { key, bubbles: true }));
}

describe("variant cycling", () => {
  it.each([
    ["symmetric valve", fixtures.variants_orientation_valve.variants],
    ["free valve", fixtures.variants_orientation_valve_free.variants],
  ])("wraps back to frame 0 after k presses (%s)", (_name, variants) => {
    const host = document.createElement("div");
    document.body.appendChild(host);
    const ghost = new PlacementGhost(host, variants as never[]);
    const router = new KeyRouter(document);
    router.setHandlers({ onCycle: () => ghost.cycle() });
    router.attach();

    const k = variants.length;
    expect(ghost.ghost.element.dataset.variantIndex).toBe("0");
    const seen = new Set<string>();
    for (let i = 0; i < k; i++) {
      seen.add(ghost.ghost.element.dataset.variantIndex!);
      press(" ");
    }
    // every variant visited once, then back to the first
    expect(seen.size).toBe(k);
    expect(ghost.ghost.element.dataset.variantIndex).toBe("0");
    expect(ghost.ghost.element.dataset.variant).toBe(
      JSON.stringify(variants[0]),
    );
    router.detach();
    ghost.dispose();
    host.remove();
  });

  it("toggles dimension side variants with space", () => {
    const cycler = new VariantCycler(
      fixtures.variants_dimension.variants as [string, number][],
    );
    expect(cycler.current()).toEqual(["x", 1]);
    expect(cycler.next()).toEqual(["x", -1]);
    expect(cycler.next()).toEqual(["x", 1]); // wrapped
  });

  it("blocks placement on an empty enumeration with a message", () => {
    const host = document.createElement("div");
    document.body.appendChild(host);
    const ghost = new PlacementGhost(host, []);
    expect(ghost.blocked).toBe(true);
    expect(host.querySelector(".ghost-preview")?.textContent).toContain(
      "no admissible",
    );
    ghost.dispose();
    host.remove();
  });

  it("space does not scroll once a cycle handler is bound", () => {
    const router = new KeyRouter(document);
    let cycles = 0;
    router.setHandlers({ onCycle: () => cycles++ });
    const event = new KeyboardEvent("keydown", { key: " ", cancelable: true });
    expect(router.route(event)).toBe(true);
    expect(event.defaultPrevented).toBe(true);
    expect(cycles).toBe(1);
  });
});
