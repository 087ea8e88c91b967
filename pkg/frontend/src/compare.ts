/** Compare mode: two panels whose configurations are locked together
 *  except for one chosen parameter (capacitance by default), so sweeps
 *  like "same cell, different C" render side by side.
 */

import type { Config } from "./api.js";

export type ParamPath = Array<string | number>;

export function getPath(config: Config, path: ParamPath): unknown {
  let node: unknown = config;
  for (const key of path) {
    if (node === null || typeof node !== "object") return undefined;
    node = (node as Record<string | number, unknown>)[key];
  }
  return node;
}

export function setPath(config: Config, path: ParamPath, value: unknown): void {
  let node: unknown = config;
  for (const key of path.slice(0, -1)) {
    node = (node as Record<string | number, unknown>)[key];
  }
  const last = path[path.length - 1] as string | number;
  (node as Record<string | number, unknown>)[last] = value;
}

export function cloneConfig(config: Config): Config {
  return JSON.parse(JSON.stringify(config)) as Config;
}

export class CompareController {
  enabled = false;
  freePath: ParamPath = ["cell", "c_farads"];

  /**
   * Produce the right panel's config from the left's: identical everywhere
   * except the free parameter, which keeps the right panel's own value.
   */
  syncRight(left: Config, right: Config): Config {
    if (!this.enabled) return right;
    const freeValue = getPath(right, this.freePath);
    const merged = cloneConfig(left);
    if (freeValue !== undefined) setPath(merged, this.freePath, freeValue);
    return merged;
  }

  /** True when edits to this parameter are allowed on the right panel. */
  isEditable(path: ParamPath): boolean {
    if (!this.enabled) return true;
    return (
      path.length === this.freePath.length &&
      path.every((key, i) => key === this.freePath[i])
    );
  }
}
