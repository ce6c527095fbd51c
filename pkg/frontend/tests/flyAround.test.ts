import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { FlyAroundPlayer } from "../src/flyAround.js";
import fixtures from "./fixtures/service.json";

function mockService(): { api: ApiClient; rendered: string[] } {
  const rendered: string[] = [];
  const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
    const u = new URL(url, "http://test");
    if (u.pathname === "/op/fly_around") {
      expect(init?.method).toBe("POST");
      return new Response(JSON.stringify(fixtures.fly_frames), {
        status: 200,
        headers: { "content-type": "application/json" },
      });
    }
    if (u.pathname === "/render.svg") {
      const key = `${u.searchParams.get("ex")}|${u.searchParams.get("ey")}`;
      rendered.push(key);
      return new Response(`<svg data-frame="${key}"></svg>`, { status: 200 });
    }
    throw new Error(`unexpected ${url}`);
  };
  return { api: new ApiClient("http://test", fetchFn), rendered };
}

describe("fly-around player", () => {
  it("steps one frame per Enter and closes when exhausted", async () => {
    const { api, rendered } = mockService();
    const shown: string[] = [];
    const player = new FlyAroundPlayer(api, (svg) => shown.push(svg));
    await player.start(90, 4);
    expect(player.isOpen).toBe(true);
    expect(shown).toHaveLength(1);

    for (let i = 0; i < 4; i++) {
      await player.advance();
    }
    expect(player.frameIndex).toBe(4);
    expect(shown).toHaveLength(5);
    // a full 90-degree turn: the last frame matches the first numerically
    const first = fixtures.fly_frames.frames[0];
    const last = fixtures.fly_frames.frames[4];
    expect(last.ex[0]).toBeCloseTo(first.ex[0], 9);
    expect(last.ey[1]).toBeCloseTo(first.ey[1], 9);

    await player.advance(); // past the end: player closes
    expect(player.isOpen).toBe(false);
    expect(shown).toHaveLength(5);
    expect(rendered).toHaveLength(5);
  });

  it("Esc exits leaving the view at the current frame", async () => {
    const { api } = mockService();
    const player = new FlyAroundPlayer(api, () => {});
    await player.start(90, 4);
    await player.advance();
    const frame = player.exit();
    expect(player.isOpen).toBe(false);
    expect(frame).toEqual(fixtures.fly_frames.frames[1]);
    expect(player.exit()).toBeNull(); // already closed
  });
});
