// Menu tree mirroring the scheme editor's groups. Every edit entry is always
// listed; entries not applicable to the selected object render greyed, with
// the enabled set taken verbatim from the service.

import type { PickContext, ViewState } from "./state.js";

export interface MenuItem {
  id: string;
  label: string;
  verb?: string;
  enabled: boolean;
}

export interface MenuGroup {
  id: string;
  label: string;
  items: MenuItem[];
}

// Editing operations offered after an object is picked (object-first flow).
export const EDIT_VERBS: ReadonlyArray<[string, string]> = [
  ["extend_pipe", "Extend pipe"],
  ["move_point", "Move point"],
  ["connect_ends", "Connect"],
  ["disconnect_ends", "Disconnect"],
  ["cut_pipe", "Cut pipe"],
  ["merge_pipes", "Merge with pipe"],
  ["insert_elbow", "Insert elbow"],
  ["delete_pipe", "Delete pipe"],
  ["attach_pipe", "Attach pipe to block"],
  ["replace_block", "Replace block"],
  ["set_offset", "Set offset"],
  ["change_leader_target", "Re-point leader"],
  ["change_main_leader", "Change main leader"],
  ["place_designator", "Position designator"],
  ["place_height_mark", "Height mark"],
  ["add_leader_text", "Leader text"],
  ["edit_spec_properties", "Spec properties"],
  ["flange_kit", "Flange kit"],
  ["set_level", "Level"],
  ["move_part", "Move part"],
  ["move_branch", "Move branch"],
  ["replicate", "Replicate"],
  ["delete_part", "Delete part"],
];

const ADD_ITEMS: ReadonlyArray<[string, string]> = [
  ["sketch_line", "Line sketch"],
  ["add_pipe", "Pipe"],
  ["place_block", "Block from library"],
  ["add_dimension", "Chain dimension"],
  ["add_text", "Text with leaders"],
  ["place_flange_designator", "Flange position"],
  ["place_height_mark", "Height mark"],
  ["import_grid", "Construction grid"],
];

const SETTINGS_ITEMS: ReadonlyArray<[string, string]> = [
  ["set_projection", "Projection"],
  ["set_visibility", "Visibility"],
  ["library", "Symbol library"],
  ["set_numbering", "Numbering mode"],
  ["set_floor", "Floor label"],
];

const DRAWING_ITEMS: ReadonlyArray<[string, string]> = [
  ["render", "Render to SVG"],
  ["set_visibility", "Visibility"],
  ["set_projection", "Projection"],
  ["set_floor", "Floor label"],
  ["axes_glyph", "Axes glyph"],
];

const SPECIAL_ITEMS: ReadonlyArray<[string, string]> = [
  ["delete_part", "Delete part"],
  ["move_part", "Move part"],
  ["replicate", "Replicate"],
  ["specified_part", "Specified part"],
  ["pipe_lengths", "Pipe lengths"],
  ["export_spec", "Specify part"],
  ["import_grid", "Import construction grid"],
  ["move_scheme", "Move scheme"],
  ["set_level", "Level"],
];

export function menuTree(
  state: ViewState,
  pick: PickContext | null,
  serviceOk: boolean,
): MenuGroup[] {
  const statics = (pairs: ReadonlyArray<[string, string]>): MenuItem[] =>
    pairs.map(([verb, label]) => ({
      id: verb,
      label,
      verb,
      enabled: serviceOk,
    }));

  const applicable = new Set(pick?.selected ? pick.applicableOps : []);
  const editItems: MenuItem[] = EDIT_VERBS.map(([verb, label]) => ({
    id: verb,
    label,
    verb,
    // never computed client-side: an entry lights up only when the service
    // listed its verb for the selected object
    enabled: serviceOk && applicable.has(verb),
  }));

  return [
    { id: "add", label: "Add", items: statics(ADD_ITEMS) },
    { id: "edit", label: "Edit", items: editItems },
    { id: "settings", label: "Settings", items: statics(SETTINGS_ITEMS) },
    { id: "drawing", label: "Scheme to drawing", items: statics(DRAWING_ITEMS) },
    {
      id: "fly",
      label: "Fly around",
      items: [{ id: "fly_around", label: "Fly around", verb: "fly_around", enabled: serviceOk }],
    },
    { id: "special", label: "Special", items: statics(SPECIAL_ITEMS) },
  ];
}

export function enabledEditVerbs(groups: MenuGroup[]): string[] {
  const edit = groups.find((g) => g.id === "edit");
  if (!edit) return [];
  return edit.items.filter((i) => i.enabled).map((i) => i.verb!).sort();
}

export function greyedEditVerbs(groups: MenuGroup[]): string[] {
  const edit = groups.find((g) => g.id === "edit");
  if (!edit) return [];
  return edit.items.filter((i) => !i.enabled).map((i) => i.verb!).sort();
}

export function renderMenu(
  root: HTMLElement,
  groups: MenuGroup[],
  onInvoke: (verb: string) => void,
): void {
  root.textContent = "";
  for (const group of groups) {
    const details = document.createElement("details");
    details.className = "menu-group";
    details.dataset.group = group.id;
    const summary = document.createElement("summary");
    summary.textContent = group.label;
    details.appendChild(summary);
    const list = document.createElement("ul");
    for (const item of group.items) {
      const li = document.createElement("li");
      const button = document.createElement("button");
      button.textContent = item.label;
      button.dataset.verb = item.verb ?? "";
      button.disabled = !item.enabled;
      button.className = item.enabled ? "menu-item" : "menu-item greyed";
      if (item.verb) {
        button.addEventListener("click", () => onInvoke(item.verb!));
      }
      li.appendChild(button);
      list.appendChild(li);
    }
    details.appendChild(list);
    root.appendChild(details);
  }
}

export function serviceBanner(root: HTMLElement, reachable: boolean): void {
  let banner = root.querySelector<HTMLElement>(".service-banner");
  if (reachable) {
    banner?.remove();
    return;
  }
  if (!banner) {
    banner = document.createElement("div");
    banner.className = "service-banner";
    root.prepend(banner);
  }
  banner.textContent = "scheme service unreachable";
}
