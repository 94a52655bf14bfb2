/** Plain-text dump of the exact plotted points, so figures diff without images. */

import { FigureData } from "./figures.js";

export function sidecarText(data: FigureData): string {
  const lines: string[] = [];
  lines.push(`# ${data.title}`);
  lines.push(`# x: ${data.xLabel}; y: ${data.yLabel}; logY: ${data.logY}`);
  for (const series of data.series) {
    const hasBand = series.points.some((p) => p.lo !== undefined);
    lines.push(`# series: ${series.label}${hasBand ? " (x y lo hi)" : " (x y)"}`);
    for (const p of series.points) {
      if (hasBand) {
        lines.push(`${p.x} ${p.y} ${p.lo} ${p.hi}`);
      } else {
        lines.push(`${p.x} ${p.y}`);
      }
    }
  }
  return lines.join("\n") + "\n";
}
