/** Orchestration: read a harness CSV, build the dataset, write SVG + sidecar. */

import { readFileSync, writeFileSync } from "node:fs";

import { parseCsv } from "./csv.js";
import { FigureSpec, figureData } from "./figures.js";
import { sidecarText } from "./sidecar.js";
import { renderSvg } from "./svg.js";

export interface RenderResult {
  image: string;
  sidecar: string;
}

const KINDS = ["trace", "sweep", "ber"];

export function loadSpec(path: string): FigureSpec {
  const raw = JSON.parse(readFileSync(path, "utf-8"));
  const kind = raw.kind;
  if (!KINDS.includes(kind)) {
    throw new Error(`figure kind must be one of ${KINDS.join("/")}, got '${kind}'`);
  }
  if (typeof raw.input !== "string" || typeof raw.output !== "string") {
    throw new Error("figure spec needs string 'input' and 'output' paths");
  }
  return {
    input: raw.input,
    kind,
    groupBy: raw.groupBy ?? raw.group_by,
    output: raw.output,
  };
}

export function render(spec: FigureSpec): RenderResult {
  const table = parseCsv(readFileSync(spec.input, "utf-8"));
  const data = figureData(spec, table);
  const sidecarPath = `${spec.output}.dat`;
  writeFileSync(spec.output, renderSvg(data));
  writeFileSync(sidecarPath, sidecarText(data));
  return { image: spec.output, sidecar: sidecarPath };
}
