/** Orchestration: read the CSV set for a figure, render, write the SVG. */

import { readFileSync, writeFileSync, existsSync, mkdirSync } from "node:fs";
import { join } from "node:path";

import { parseCurveCsv, CurveData } from "./csv.js";
import { figureSpec, parseMarkers, ALL_FIGURES } from "./figures.js";
import { renderFigure } from "./svg.js";

export function renderOne(which: 3 | 4 | 5, inDir: string, outDir: string): string {
  const spec = figureSpec(which);
  const curves = new Map<string, CurveData>();
  for (const series of spec.series) {
    if (!curves.has(series.file)) {
      const path = join(inDir, series.file);
      if (!existsSync(path)) {
        throw new Error(`${spec.name}: missing input ${path}`);
      }
      curves.set(series.file, parseCurveCsv(readFileSync(path, "utf8"), path));
    }
  }
  let markers = null;
  if (spec.markersFile) {
    const markerPath = join(inDir, spec.markersFile);
    if (existsSync(markerPath)) {
      markers = parseMarkers(readFileSync(markerPath, "utf8"), markerPath);
    }
  }
  const svg = renderFigure(spec, curves, markers);
  mkdirSync(outDir, { recursive: true });
  const outPath = join(outDir, spec.output);
  writeFileSync(outPath, svg, "utf8");
  return outPath;
}

export function renderMany(
  which: "3" | "4" | "5" | "all",
  inDir: string,
  outDir: string,
): string[] {
  const targets = which === "all" ? ALL_FIGURES : [Number(which) as 3 | 4 | 5];
  return targets.map((figure) => renderOne(figure, inDir, outDir));
}
