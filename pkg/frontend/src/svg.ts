/** Dependency-free SVG rendering of a FigureData. */

import { FigureData, Series } from "./figures.js";

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { left: 70, right: 160, top: 40, bottom: 50 };
const COLORS = ["#1f6fb2", "#d1495b", "#3a9d5d", "#8f5fb8", "#c98a17", "#4b4b4b"];

interface Scale {
  (value: number): number;
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (!Number.isFinite(lo)) {
    return [0, 1];
  }
  if (lo === hi) {
    return [lo - 0.5, hi + 0.5];
  }
  return [lo, hi];
}

function linearTicks(lo: number, hi: number, count = 5): number[] {
  const span = hi - lo;
  const rawStep = span / count;
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const step = [1, 2, 5, 10].map((m) => m * power).find((s) => span / s <= count) ?? power * 10;
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + 1e-12 * Math.abs(hi); v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.floor(Math.log10(lo)); e <= Math.ceil(Math.log10(hi)); e += 1) {
    const v = Math.pow(10, e);
    if (v >= lo / 1.0001 && v <= hi * 1.0001) {
      ticks.push(v);
    }
  }
  return ticks.length >= 2 ? ticks : [lo, hi];
}

function formatTick(value: number): string {
  if (value !== 0 && (Math.abs(value) < 1e-3 || Math.abs(value) >= 1e4)) {
    return value.toExponential(0);
  }
  return String(Number(value.toPrecision(6)));
}

function polyline(points: Array<[number, number]>): string {
  return points.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(" ");
}

export function renderSvg(data: FigureData): string {
  const xs = data.series.flatMap((s) => s.points.map((p) => p.x));
  let ys = data.series.flatMap((s) =>
    s.points.flatMap((p) => [p.y, p.lo ?? p.y, p.hi ?? p.y]),
  );
  if (data.logY) {
    ys = ys.filter((v) => v > 0);
    if (ys.length === 0) {
      ys = [1e-6, 1];
    }
  }
  const [xLo, xHi] = extent(xs);
  const [yLo, yHi] = extent(ys);
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;

  const sx: Scale = (v) => MARGIN.left + ((v - xLo) / (xHi - xLo)) * plotW;
  const sy: Scale = data.logY
    ? (v) => MARGIN.top + plotH - ((Math.log10(v) - Math.log10(yLo)) / (Math.log10(yHi) - Math.log10(yLo))) * plotH
    : (v) => MARGIN.top + plotH - ((v - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="15">${data.title}</text>`,
  );

  const xTicks = linearTicks(xLo, xHi);
  const yTicks = data.logY ? logTicks(yLo, yHi) : linearTicks(yLo, yHi);
  for (const t of xTicks) {
    const x = sx(t);
    parts.push(
      `<line x1="${x}" y1="${MARGIN.top}" x2="${x}" y2="${MARGIN.top + plotH}" stroke="#e3e3e3"/>`,
      `<text x="${x}" y="${MARGIN.top + plotH + 18}" text-anchor="middle">${formatTick(t)}</text>`,
    );
  }
  for (const t of yTicks) {
    const y = sy(t);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + plotW}" y2="${y}" stroke="#e3e3e3"/>`,
      `<text x="${MARGIN.left - 8}" y="${y + 4}" text-anchor="end">${formatTick(t)}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" ` +
      `fill="none" stroke="#444"/>`,
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 12}" text-anchor="middle">${data.xLabel}</text>`,
    `<text x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">${data.yLabel}</text>`,
  );

  data.series.forEach((series: Series, index: number) => {
    const color = COLORS[index % COLORS.length];
    const clampY = (v: number) => (data.logY ? Math.max(v, yLo) : v);
    if (data.band === "fill" && series.points.every((p) => p.lo !== undefined)) {
      const upper = series.points.map((p): [number, number] => [sx(p.x), sy(clampY(p.hi!))]);
      const lower = [...series.points]
        .reverse()
        .map((p): [number, number] => [sx(p.x), sy(clampY(p.lo!))]);
      parts.push(
        `<polygon points="${polyline([...upper, ...lower])}" fill="${color}" opacity="0.18"/>`,
      );
    }
    if (data.band === "errorbar") {
      for (const p of series.points) {
        if (p.lo === undefined || p.hi === undefined) continue;
        const x = sx(p.x);
        parts.push(
          `<line x1="${x}" y1="${sy(clampY(p.lo))}" x2="${x}" y2="${sy(clampY(p.hi))}" ` +
            `stroke="${color}" stroke-width="1.2"/>`,
        );
      }
    }
    const line = series.points.map((p): [number, number] => [sx(p.x), sy(clampY(p.y))]);
    parts.push(
      `<polyline points="${polyline(line)}" fill="none" stroke="${color}" stroke-width="1.8"/>`,
    );
    for (const [x, y] of line) {
      parts.push(`<circle cx="${x}" cy="${y}" r="2.6" fill="${color}"/>`);
    }
    const legendY = MARGIN.top + 14 + index * 18;
    parts.push(
      `<line x1="${MARGIN.left + plotW + 12}" y1="${legendY - 4}" ` +
        `x2="${MARGIN.left + plotW + 34}" y2="${legendY - 4}" stroke="${color}" stroke-width="2"/>`,
      `<text x="${MARGIN.left + plotW + 40}" y="${legendY}">${series.label}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}
