import { mkdtempSync, readdirSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { CURVE_HEADER } from "../src/csv.js";
import { figureSpec, ALL_FIGURES } from "../src/figures.js";
import { renderMany, renderOne } from "../src/render.js";

/** Synthesize a schema-true CSV with non-trivial float strings. */
function fakeCsv(n: number, seedOffset: number): string {
  const rows = [CURVE_HEADER];
  for (let i = 0; i < n; i += 1) {
    const t = 4.783185307179586 + (3.0 * i) / (n - 1);
    const fp = 0.5 + 0.3 * Math.sin(0.7 * i + seedOffset);
    const fm = 0.5 + 0.45 * Math.cos(0.3 * i + seedOffset);
    rows.push(`${t},${fp},${fm}`);
  }
  return rows.join("\n") + "\n";
}

function stageInputs(): string {
  const dir = mkdtempSync(join(tmpdir(), "cvnet-figs-"));
  const files = new Set<string>();
  for (const which of ALL_FIGURES) {
    for (const series of figureSpec(which).series) {
      files.add(series.file);
    }
  }
  let offset = 0;
  for (const file of [...files].sort()) {
    writeFileSync(join(dir, file), fakeCsv(41, offset), "ascii");
    offset += 1;
  }
  writeFileSync(
    join(dir, "fig3_markers.json"),
    JSON.stringify({ telecloning_interval: { t_lo: 6.2832, t_hi: 6.2846 }, nbar: 0 }) + "\n",
    "ascii",
  );
  return dir;
}

function extractAttr(svg: string, element: string, attr: string): string[] {
  const out: string[] = [];
  const pattern = new RegExp(`<polyline[^>]*class="${element}"[^>]*>`, "g");
  for (const match of svg.match(pattern) ?? []) {
    const found = match.match(new RegExp(`${attr}="([^"]*)"`));
    if (found) out.push(found[1]);
  }
  return out;
}

describe("renderOne / renderMany", () => {
  it("renders all three figures without error", () => {
    const inDir = stageInputs();
    const outDir = mkdtempSync(join(tmpdir(), "cvnet-svg-"));
    const written = renderMany("all", inDir, outDir);
    expect(written).toHaveLength(3);
    for (const path of written) {
      const svg = readFileSync(path, "ascii");
      expect(svg.startsWith("<svg ")).toBe(true);
      expect(svg).toContain("</svg>");
    }
  });

  it("embeds the CSV y-values verbatim - no numeric transformation", () => {
    const inDir = stageInputs();
    const outDir = mkdtempSync(join(tmpdir(), "cvnet-svg-"));
    for (const which of ALL_FIGURES) {
      const spec = figureSpec(which);
      const svg = readFileSync(renderOne(which, inDir, outDir), "ascii");
      const polylines = svg.match(/<polyline[^>]*class="series"[^>]*>/g) ?? [];
      expect(polylines).toHaveLength(spec.series.length);
      for (const series of spec.series) {
        const csvLines = readFileSync(join(inDir, series.file), "ascii")
          .trimEnd()
          .split("\n")
          .slice(1);
        const columnIndex = series.column === "f_plus" ? 1 : 2;
        const expected = csvLines.map((row) => row.split(",")[columnIndex]).join(" ");
        const element = polylines.find(
          (p) =>
            p.includes(`data-source="${series.file}"`) &&
            p.includes(`data-column="${series.column}"`),
        );
        expect(element, `${spec.name} ${series.label}`).toBeDefined();
        const got = element!.match(/data-y="([^"]*)"/)![1];
        expect(got).toBe(expected);
      }
    }
  });

  it("clips series to the fixed y-range plot area", () => {
    const inDir = stageInputs();
    const outDir = mkdtempSync(join(tmpdir(), "cvnet-svg-"));
    const svg = readFileSync(renderOne(4, inDir, outDir), "ascii");
    expect(svg).toContain('<clipPath id="plot-area">');
    const polylines = svg.match(/<polyline[^>]*class="series"[^>]*>/g) ?? [];
    for (const element of polylines) {
      expect(element).toContain('clip-path="url(#plot-area)"');
    }
    // y axis spans exactly the declared range
    expect(svg).toContain(">0.40</text>");
    expect(svg).toContain(">1.00</text>");
  });

  it("is deterministic for identical inputs", () => {
    const inDir = stageInputs();
    const outA = mkdtempSync(join(tmpdir(), "cvnet-svg-"));
    const outB = mkdtempSync(join(tmpdir(), "cvnet-svg-"));
    const a = readFileSync(renderOne(3, inDir, outA), "ascii");
    const b = readFileSync(renderOne(3, inDir, outB), "ascii");
    expect(a).toBe(b);
  });

  it("marks the telecloning interval on fig3", () => {
    const inDir = stageInputs();
    const outDir = mkdtempSync(join(tmpdir(), "cvnet-svg-"));
    const svg = readFileSync(renderOne(3, inDir, outDir), "ascii");
    expect(svg).toContain('data-marker="t_lo"');
    expect(svg).toContain('data-marker="t_hi"');
    expect(svg).toContain('data-t="6.2832"');
    // figs 4 and 5 carry no markers
    const svg4 = readFileSync(renderOne(4, inDir, outDir), "ascii");
    expect(svg4).not.toContain("data-marker");
  });

  it("refuses a schema-violating CSV", () => {
    const inDir = stageInputs();
    writeFileSync(join(inDir, "fig4_k2_het_nbar0.csv"), "time,fp,fm\n1,2,3\n", "ascii");
    const outDir = mkdtempSync(join(tmpdir(), "cvnet-svg-"));
    expect(() => renderOne(4, inDir, outDir)).toThrow(/header/);
  });

  it("refuses an empty grid and writes nothing", () => {
    const inDir = stageInputs();
    writeFileSync(join(inDir, "fig5_k0_het_nbar0.csv"), `${CURVE_HEADER}\n`, "ascii");
    const outDir = mkdtempSync(join(tmpdir(), "cvnet-svg-"));
    expect(() => renderOne(5, inDir, outDir)).toThrow(/no data rows/);
    expect(readdirSync(outDir)).not.toContain("fig5.svg");
  });

  it("fails on a missing input file", () => {
    const inDir = mkdtempSync(join(tmpdir(), "cvnet-empty-"));
    const outDir = mkdtempSync(join(tmpdir(), "cvnet-svg-"));
    expect(() => renderOne(3, inDir, outDir)).toThrow(/missing input/);
  });

  it("extracts series y attributes with the helper too", () => {
    const inDir = stageInputs();
    const outDir = mkdtempSync(join(tmpdir(), "cvnet-svg-"));
    const svg = readFileSync(renderOne(5, inDir, outDir), "ascii");
    const ys = extractAttr(svg, "series", "data-y");
    expect(ys).toHaveLength(figureSpec(5).series.length);
  });
});
