/** Dataset extraction: CSV tables to plotted series for each figure kind. */

import { CsvTable, columnIndex } from "./csv.js";

export type FigureKind = "trace" | "sweep" | "ber";

export interface FigureSpec {
  input: string;
  kind: FigureKind;
  groupBy?: string;
  output: string;
}

export interface Point {
  x: number;
  y: number;
  lo?: number;
  hi?: number;
}

export interface Series {
  label: string;
  points: Point[];
}

export interface FigureData {
  title: string;
  xLabel: string;
  yLabel: string;
  logY: boolean;
  band: "fill" | "errorbar" | "none";
  series: Series[];
}

/** Linearly interpolated quantile of an unsorted sample (numpy's default). */
export function quantile(values: number[], q: number): number {
  const sorted = [...values].sort((a, b) => a - b);
  const pos = (sorted.length - 1) * q;
  const lower = Math.floor(pos);
  const upper = Math.ceil(pos);
  return sorted[lower] + (sorted[upper] - sorted[lower]) * (pos - lower);
}

export function traceData(table: CsvTable): FigureData {
  const iterIdx = columnIndex(table, "iter");
  const rateIdx = columnIndex(table, "R_OAM");
  const points = table.rows.map((row) => ({
    x: Number(row[iterIdx]),
    y: Number(row[rateIdx]),
  }));
  return {
    title: "Secrecy rate vs outer iteration",
    xLabel: "iteration",
    yLabel: "R_OAM (bits/s/Hz)",
    logY: false,
    band: "none",
    series: [{ label: "R_OAM", points }],
  };
}

export function sweepData(table: CsvTable, groupBy = "scheme"): FigureData {
  const groupIdx = columnIndex(table, groupBy);
  const valueIdx = columnIndex(table, "value");
  const rateIdx = columnIndex(table, "R_OAM");
  const groups = new Map<string, Map<number, number[]>>();
  for (const row of table.rows) {
    const group = row[groupIdx];
    const value = Number(row[valueIdx]);
    if (!groups.has(group)) {
      groups.set(group, new Map());
    }
    const byValue = groups.get(group)!;
    if (!byValue.has(value)) {
      byValue.set(value, []);
    }
    byValue.get(value)!.push(Number(row[rateIdx]));
  }
  const series: Series[] = [];
  for (const [label, byValue] of groups) {
    const points = [...byValue.entries()]
      .sort((a, b) => a[0] - b[0])
      .map(([x, samples]) => ({
        x,
        y: quantile(samples, 0.5),
        lo: quantile(samples, 0.25),
        hi: quantile(samples, 0.75),
      }));
    series.push({ label, points });
  }
  return {
    title: "Secrecy rate sweep (median, interquartile band)",
    xLabel: "swept value",
    yLabel: "R_OAM (bits/s/Hz)",
    logY: false,
    band: "fill",
    series,
  };
}

/** 95% normal-approximation confidence half-width. */
const CI_FACTOR = 1.96;

export function berData(table: CsvTable): FigureData {
  const snrIdx = columnIndex(table, "snr_db");
  const series: Series[] = [];
  for (const receiver of ["bob", "eve"]) {
    const berIdx = columnIndex(table, `${receiver}_ber`);
    const errIdx = columnIndex(table, `${receiver}_stderr`);
    const points = table.rows
      .map((row) => {
        const ber = Number(row[berIdx]);
        const half = CI_FACTOR * Number(row[errIdx]);
        return { x: Number(row[snrIdx]), y: ber, lo: ber - half, hi: ber + half };
      })
      .sort((a, b) => a.x - b.x);
    series.push({ label: receiver, points });
  }
  return {
    title: "Bit error rate vs transmit SNR",
    xLabel: "transmit SNR (dB)",
    yLabel: "BER",
    logY: true,
    band: "errorbar",
    series,
  };
}

export function figureData(spec: FigureSpec, table: CsvTable): FigureData {
  if (table.rows.length === 0) {
    throw new Error(`no data rows in '${spec.input}'`);
  }
  switch (spec.kind) {
    case "trace":
      return traceData(table);
    case "sweep":
      return sweepData(table, spec.groupBy ?? "scheme");
    case "ber":
      return berData(table);
    default:
      throw new Error(`unknown figure kind '${(spec as FigureSpec).kind}'`);
  }
}
