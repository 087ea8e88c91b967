/** Declarative control definitions for a config panel, plus the slider
 *  value mappings. Physical quantities spanning decades (R, C, i_s, N_d
 *  bounds) use log10 sliders; everything here is pure so the mappings are
 *  unit-testable without a DOM.
 */

import type { ParamPath } from "./compare.js";

export interface SliderDef {
  kind: "slider";
  id: string;
  label: string;
  path: ParamPath;
  min: number;
  max: number;
  step: number;
  /** Slider position is log10(value) when set. */
  log: boolean;
  unit?: string;
}

export interface SelectDef {
  kind: "select";
  id: string;
  label: string;
  path: ParamPath;
  options: Array<{ label: string; value: number }>;
}

export type ControlDef = SliderDef | SelectDef;

export const CONTROLS: ControlDef[] = [
  {
    kind: "slider",
    id: "r-ohms",
    label: "R",
    path: ["cell", "r_ohms"],
    min: 2,
    max: 5,
    step: 0.01,
    log: true,
    unit: "Ω",
  },
  {
    kind: "slider",
    id: "c-farads",
    label: "C",
    path: ["cell", "c_farads"],
    min: -10,
    max: -7,
    step: 0.01,
    log: true,
    unit: "F",
  },
  {
    kind: "slider",
    id: "a00",
    label: "A₀₀",
    path: ["cell", "a_template", 4],
    min: 0,
    max: 4,
    step: 0.05,
    log: false,
  },
  {
    kind: "slider",
    id: "i-s",
    label: "i_s",
    path: ["memristor", "i_s"],
    min: -13,
    max: -5,
    step: 0.05,
    log: true,
    unit: "A",
  },
  {
    kind: "slider",
    id: "v-0",
    label: "v₀",
    path: ["memristor", "v_0"],
    min: 0.05,
    max: 1.0,
    step: 0.01,
    log: false,
    unit: "V",
  },
  {
    kind: "select",
    id: "polarity",
    label: "polarity",
    path: ["memristor", "polarity"],
    options: [
      { label: "-1", value: -1 },
      { label: "+1", value: 1 },
    ],
  },
  {
    kind: "slider",
    id: "horizon",
    label: "horizon",
    path: ["solver", "horizon"],
    min: -6,
    max: -2,
    step: 0.05,
    log: true,
    unit: "s",
  },
];

export function sliderToValue(def: SliderDef, position: number): number {
  return def.log ? Math.pow(10, position) : position;
}

export function valueToSlider(def: SliderDef, value: number): number {
  return def.log ? Math.log10(value) : value;
}

/**
 * Seed-concentration slider: coarse decade plus fine mantissa, so the full
 * 1e24..1e27 span stays reachable without losing sub-decade resolution.
 */
export function decadeMantissaToValue(decade: number, mantissa: number): number {
  return mantissa * Math.pow(10, decade);
}

export function valueToDecadeMantissa(value: number): {
  decade: number;
  mantissa: number;
} {
  const decade = Math.floor(Math.log10(value));
  return { decade, mantissa: value / Math.pow(10, decade) };
}
