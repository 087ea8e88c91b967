/** DOM wiring for the two-panel explorer. All physics numbers come from the
 *  service; this file only routes them between controls, fetches, and the
 *  embedded server-rendered SVG.
 */

import { ApiClient, ApiError } from "./api.js";
import type { Config } from "./api.js";
import { debounce } from "./debounce.js";
import type { Debounced } from "./debounce.js";
import { PanelState } from "./state.js";
import {
  CompareController,
  cloneConfig,
  getPath,
  setPath,
} from "./compare.js";
import type { ParamPath } from "./compare.js";
import {
  CONTROLS,
  decadeMantissaToValue,
  sliderToValue,
  valueToSlider,
} from "./controls.js";
import type { SliderDef } from "./controls.js";
import {
  geometryFromSvg,
  insidePlot,
  pixelToPhase,
} from "./transform.js";
import type { PlotGeometry } from "./transform.js";
import { trajectoryOverlay } from "./overlay.js";

const SEED_COLORS = ["#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

function el<T extends HTMLElement>(parent: ParentNode, selector: string): T {
  const node = parent.querySelector(selector);
  if (node === null) throw new Error(`missing element ${selector}`);
  return node as T;
}

function download(filename: string, mime: string, bytes: string): void {
  const blob = new Blob([bytes], { type: mime });
  const url = URL.createObjectURL(blob);
  const a = document.createElement("a");
  a.href = url;
  a.download = filename;
  a.click();
  URL.revokeObjectURL(url);
}

class Panel {
  config: Config;
  readonly state = new PanelState();
  private geom: PlotGeometry | undefined;
  private seedCount = 0;
  /** Bumped on every config edit; seeded runs from older generations are
   *  dropped (their hash covers the seed, so it can't be compared directly). */
  private editSeq = 0;
  private readonly refreshSoon: Debounced<[]>;
  private readonly sliders = new Map<string, HTMLInputElement>();
  private readonly readouts = new Map<string, HTMLElement>();

  onConfigEdited: (() => void) | undefined;

  constructor(
    readonly root: HTMLElement,
    private client: ApiClient,
    defaults: Config,
  ) {
    this.config = cloneConfig(defaults);
    this.refreshSoon = debounce(() => void this.refresh(), 250);
    this.buildControls();
    this.bindPlot();
    this.bindSeedForm();
    this.bindExports();
  }

  setClient(client: ApiClient): void {
    this.client = client;
  }

  // ---- controls ----------------------------------------------------------

  private buildControls(): void {
    const host = el<HTMLElement>(this.root, ".controls");
    for (const def of CONTROLS) {
      const row = document.createElement("label");
      row.className = "control-row";
      row.dataset.control = def.id;
      const caption = document.createElement("span");
      caption.textContent =
        def.kind === "slider" && def.unit !== undefined
          ? `${def.label} (${def.unit})`
          : def.label;
      row.appendChild(caption);

      if (def.kind === "slider") {
        const input = document.createElement("input");
        input.type = "range";
        input.min = String(def.min);
        input.max = String(def.max);
        input.step = String(def.step);
        input.value = String(
          valueToSlider(def, Number(getPath(this.config, def.path))),
        );
        const readout = document.createElement("output");
        readout.textContent = this.format(def, input.valueAsNumber);
        input.addEventListener("input", () => {
          const value = sliderToValue(def, input.valueAsNumber);
          readout.textContent = this.format(def, input.valueAsNumber);
          this.edit(def.path, value);
        });
        row.appendChild(input);
        row.appendChild(readout);
        this.sliders.set(def.id, input);
        this.readouts.set(def.id, readout);
      } else {
        const select = document.createElement("select");
        for (const opt of def.options) {
          const o = document.createElement("option");
          o.value = String(opt.value);
          o.textContent = opt.label;
          select.appendChild(o);
        }
        select.value = String(getPath(this.config, def.path));
        select.addEventListener("change", () => {
          this.edit(def.path, Number(select.value));
        });
        row.appendChild(select);
      }
      host.appendChild(row);
    }
  }

  private format(def: SliderDef, position: number): string {
    const value = sliderToValue(def, position);
    return value.toExponential(2);
  }

  private edit(path: ParamPath, value: unknown): void {
    setPath(this.config, path, value);
    this.editSeq += 1;
    this.onConfigEdited?.();
    this.refreshSoon();
  }

  /** Push a config in from outside (compare sync) and refresh. */
  adoptConfig(config: Config): void {
    this.config = config;
    this.editSeq += 1;
    this.syncControlPositions();
    this.refreshSoon();
  }

  private syncControlPositions(): void {
    for (const def of CONTROLS) {
      if (def.kind !== "slider") continue;
      const input = this.sliders.get(def.id);
      const readout = this.readouts.get(def.id);
      if (input === undefined || readout === undefined) continue;
      const value = Number(getPath(this.config, def.path));
      input.value = String(valueToSlider(def, value));
      readout.textContent = this.format(def, input.valueAsNumber);
    }
  }

  setLocked(lockedExcept: ParamPath | undefined): void {
    for (const def of CONTROLS) {
      const row = this.root.querySelector<HTMLElement>(
        `[data-control="${def.id}"]`,
      );
      if (row === null) continue;
      const free =
        lockedExcept !== undefined &&
        def.path.length === lockedExcept.length &&
        def.path.every((k, i) => k === lockedExcept[i]);
      const disabled = lockedExcept !== undefined && !free;
      row.classList.toggle("locked", disabled);
      for (const input of row.querySelectorAll<HTMLInputElement>(
        "input, select",
      )) {
        input.disabled = disabled;
      }
    }
  }

  // ---- fetching ----------------------------------------------------------

  async refresh(): Promise<void> {
    const ticket = this.state.begin();
    this.clearBanner();
    try {
      const [analyzed, rendered] = await Promise.all([
        this.client.analyze(this.config, ticket.signal),
        this.client.portraitSvg(this.config, ticket.signal),
      ]);
      const snap = this.state.accept(
        ticket.seq,
        analyzed.doc,
        analyzed.raw,
        analyzed.hash,
        rendered.svg,
        rendered.hash,
      );
      if (snap === undefined) return; // stale or mismatched pair
      this.showPortrait(snap.svg);
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") return;
      if (!this.state.fail(ticket.seq)) return;
      if (err instanceof ApiError) {
        this.banner(err.body.path, err.body.message ?? err.body.error);
      } else {
        this.banner(undefined, String(err));
      }
    }
  }

  private showPortrait(svg: string): void {
    const host = el<HTMLElement>(this.root, ".plot");
    host.innerHTML = svg;
    const rootSvg = host.querySelector("svg");
    if (rootSvg === null) throw new Error("service returned no svg");
    this.geom = geometryFromSvg(rootSvg);
    this.seedCount = 0;
    el<HTMLElement>(this.root, ".hash").textContent =
      this.state.snapshot?.hash.slice(0, 12) ?? "";
  }

  // ---- seeding -----------------------------------------------------------

  private bindPlot(): void {
    const host = el<HTMLElement>(this.root, ".plot");
    host.addEventListener("click", (event) => {
      const rootSvg = host.querySelector("svg");
      if (rootSvg === null || this.geom === undefined) return;
      const rect = rootSvg.getBoundingClientRect();
      const scaleX = rootSvg.viewBox.baseVal.width / rect.width;
      const scaleY = rootSvg.viewBox.baseVal.height / rect.height;
      const x = (event.clientX - rect.left) * scaleX;
      const y = (event.clientY - rect.top) * scaleY;
      if (!insidePlot(this.geom, x, y)) return;
      const { vC, nD } = pixelToPhase(this.geom, x, y);
      void this.seed(vC, nD);
    });
  }

  private bindSeedForm(): void {
    const decade = el<HTMLInputElement>(this.root, ".seed-decade");
    const mantissa = el<HTMLInputElement>(this.root, ".seed-mantissa");
    const vInput = el<HTMLInputElement>(this.root, ".seed-v");
    const readout = el<HTMLElement>(this.root, ".seed-readout");
    const update = (): void => {
      const n = decadeMantissaToValue(
        decade.valueAsNumber,
        mantissa.valueAsNumber,
      );
      readout.textContent = `N_d = ${n.toExponential(3)} m⁻³`;
    };
    decade.addEventListener("input", update);
    mantissa.addEventListener("input", update);
    update();
    el<HTMLButtonElement>(this.root, ".seed-run").addEventListener(
      "click",
      () => {
        const n = decadeMantissaToValue(
          decade.valueAsNumber,
          mantissa.valueAsNumber,
        );
        void this.seed(Number(vInput.value), n);
      },
    );
  }

  async seed(vC: number, nD: number): Promise<void> {
    const snap = this.state.snapshot;
    if (snap === undefined || this.geom === undefined) return;
    const editAtSeed = this.editSeq;
    try {
      const result = await this.client.trajectory(
        { v_c0: vC, n_d0: nD },
        cloneConfig(this.config),
      );
      // a control may have changed while the solver ran
      if (this.editSeq !== editAtSeed || this.state.snapshot !== snap) return;
      const color = SEED_COLORS[this.seedCount % SEED_COLORS.length]!;
      this.seedCount += 1;
      const fragment = trajectoryOverlay(this.geom, result.trajectory, color);
      const rootSvg = this.root.querySelector(".plot svg");
      if (rootSvg !== null && fragment !== "") {
        rootSvg.insertAdjacentHTML("beforeend", fragment);
      }
      if (!result.ok) {
        this.banner(
          undefined,
          `trajectory ${result.trajectory.status}: partial path shown dashed`,
        );
      }
    } catch (err) {
      if (err instanceof ApiError) {
        this.banner(err.body.path, err.body.message ?? err.body.error);
      } else {
        this.banner(undefined, String(err));
      }
    }
  }

  // ---- export + errors ---------------------------------------------------

  private bindExports(): void {
    el<HTMLButtonElement>(this.root, ".export-json").addEventListener(
      "click",
      () => {
        const snap = this.state.snapshot;
        if (snap === undefined) return;
        download(
          `portrait-${snap.hash.slice(0, 12)}.json`,
          "application/json",
          snap.docRaw,
        );
      },
    );
    el<HTMLButtonElement>(this.root, ".export-svg").addEventListener(
      "click",
      () => {
        const snap = this.state.snapshot;
        if (snap === undefined) return;
        download(
          `portrait-${snap.hash.slice(0, 12)}.svg`,
          "image/svg+xml",
          snap.svg,
        );
      },
    );
  }

  private banner(path: string | undefined, message: string): void {
    const box = el<HTMLElement>(this.root, ".banner");
    box.hidden = false;
    el<HTMLElement>(box, ".banner-path").textContent = path ?? "";
    el<HTMLElement>(box, ".banner-message").textContent = message;
  }

  private clearBanner(): void {
    el<HTMLElement>(this.root, ".banner").hidden = true;
  }
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const baseInput = el<HTMLInputElement>(document, "#base-url");
  baseInput.value = params.get("api") ?? "";
  let client = new ApiClient(baseInput.value);

  const defaults = await client.defaults();
  const left = new Panel(el<HTMLElement>(document, "#panel-left"), client, defaults);
  const right = new Panel(el<HTMLElement>(document, "#panel-right"), client, defaults);
  const compare = new CompareController();

  const applyCompare = (): void => {
    if (!compare.enabled) return;
    right.adoptConfig(compare.syncRight(left.config, right.config));
  };
  left.onConfigEdited = applyCompare;

  const toggle = el<HTMLInputElement>(document, "#compare-toggle");
  toggle.addEventListener("change", () => {
    compare.enabled = toggle.checked;
    right.setLocked(compare.enabled ? compare.freePath : undefined);
    document.body.classList.toggle("comparing", compare.enabled);
    applyCompare();
  });

  baseInput.addEventListener("change", () => {
    client = new ApiClient(baseInput.value);
    left.setClient(client);
    right.setClient(client);
    void left.refresh();
    void right.refresh();
  });

  await Promise.all([left.refresh(), right.refresh()]);
}

void boot();
