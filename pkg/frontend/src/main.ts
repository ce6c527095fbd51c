// Browser bootstrap: wire the editor to the page and the scheme service.

import { ApiClient } from "./api.js";
import { Editor } from "./editor.js";

function requireEl(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el;
}

export async function bootstrap(base = ""): Promise<Editor> {
  const api = new ApiClient(base);
  const editor = new Editor(
    api,
    {
      menu: requireEl("menu"),
      canvas: requireEl("canvas"),
      status: requireEl("status"),
      dialog: requireEl("dialog"),
    },
    window,
  );
  const canvas = requireEl("canvas");
  canvas.addEventListener("click", (e) => {
    void editor.pickAt(e.clientX, e.clientY);
  });
  canvas.addEventListener("wheel", (e) => {
    e.preventDefault();
    editor.viewer.zoomBy(e.deltaY < 0 ? 1.1 : 1 / 1.1);
  });
  await editor.boot();
  return editor;
}

if (typeof document !== "undefined" && document.getElementById("canvas")) {
  void bootstrap();
}
