/**
 * Deterministic SVG rendering of fidelity curves.
 *
 * Pixel placement is presentation only: every series element carries the
 * verbatim CSV cell strings in data-t / data-y attributes, so the rendered
 * data can be compared against the source files byte for byte.
 */

import { CurveData } from "./csv.js";
import { FigureSpec, SeriesSpec, TelecloningMarkers } from "./figures.js";

const WIDTH = 880;
const HEIGHT = 520;
const MARGIN = { left: 64, right: 220, top: 44, bottom: 48 };

const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

function px(value: number): string {
  return value.toFixed(3);
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

interface Scale {
  (value: number): number;
}

function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0;
  return (value: number) => r0 + ((value - d0) / span) * (r1 - r0);
}

function ticks(lo: number, hi: number, count: number): number[] {
  const rawStep = (hi - lo) / Math.max(count, 1);
  const magnitude = 10 ** Math.floor(Math.log10(rawStep));
  const candidates = [1, 2, 2.5, 5, 10].map((m) => m * magnitude);
  const step = candidates.find((c) => c >= rawStep) ?? rawStep;
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    out.push(Number(v.toFixed(12)));
  }
  return out;
}

export function renderFigure(
  spec: FigureSpec,
  curves: Map<string, CurveData>,
  markers: TelecloningMarkers | null,
): string {
  const xsAll: number[] = [];
  for (const series of spec.series) {
    const curve = curves.get(series.file);
    if (!curve) {
      throw new Error(`${spec.name}: missing curve data for ${series.file}`);
    }
    xsAll.push(curve.tPrime[0], curve.tPrime[curve.tPrime.length - 1]);
  }
  const xLo = Math.min(...xsAll);
  const xHi = Math.max(...xsAll);
  if (!(xLo < xHi)) {
    throw new Error(`${spec.name}: degenerate t' range [${xLo}, ${xHi}]`);
  }
  const [yLo, yHi] = spec.yRange;
  const sx = linearScale(xLo, xHi, MARGIN.left, MARGIN.left + PLOT_W);
  const sy = linearScale(yLo, yHi, MARGIN.top + PLOT_H, MARGIN.top);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<title>${escapeXml(spec.title)}</title>`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<clipPath id="plot-area"><rect x="${MARGIN.left}" y="${MARGIN.top}" ` +
      `width="${PLOT_W}" height="${PLOT_H}"/></clipPath>`,
  );

  // axes and grid
  for (const tick of ticks(xLo, xHi, 7)) {
    const x = px(sx(tick));
    parts.push(
      `<line x1="${x}" y1="${MARGIN.top}" x2="${x}" y2="${MARGIN.top + PLOT_H}" ` +
        `stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${x}" y="${MARGIN.top + PLOT_H + 18}" text-anchor="middle">` +
        `${escapeXml(String(tick))}</text>`,
    );
  }
  for (const tick of ticks(yLo, yHi, 6)) {
    const y = px(sy(tick));
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + PLOT_W}" y2="${y}" ` +
        `stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${y}" text-anchor="end" dominant-baseline="middle">` +
        `${escapeXml(tick.toFixed(2))}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${PLOT_W}" height="${PLOT_H}" ` +
      `fill="none" stroke="#333333"/>`,
  );
  parts.push(
    `<text x="${MARGIN.left + PLOT_W / 2}" y="${HEIGHT - 10}" text-anchor="middle">t'</text>`,
  );
  parts.push(
    `<text x="18" y="${MARGIN.top + PLOT_H / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 18 ${MARGIN.top + PLOT_H / 2})">fidelity</text>`,
  );
  parts.push(
    `<text x="${MARGIN.left}" y="${MARGIN.top - 16}" font-size="14">` +
      `${escapeXml(spec.title)}</text>`,
  );

  // telecloning interval markers
  if (markers) {
    for (const [tag, value] of [["t_lo", markers.t_lo], ["t_hi", markers.t_hi]] as const) {
      const x = px(sx(value));
      parts.push(
        `<line class="marker" data-marker="${tag}" data-t="${value}" x1="${x}" ` +
          `y1="${MARGIN.top}" x2="${x}" y2="${MARGIN.top + PLOT_H}" ` +
          `stroke="#555555" stroke-width="1" stroke-dasharray="4 4"/>`,
      );
    }
    parts.push(
      `<text x="${px(sx(markers.t_hi) + 4)}" y="${MARGIN.top + 14}" fill="#555555">` +
        `telecloning</text>`,
    );
  }

  // series, clipped to the plot area; raw CSV strings ride along untouched
  for (const series of spec.series) {
    const curve = curves.get(series.file)!;
    const column = series.column === "f_plus" ? curve.fPlus : curve.fMinus;
    const rawColumn = series.column === "f_plus" ? curve.raw.fPlus : curve.raw.fMinus;
    const points = curve.tPrime
      .map((t, i) => `${px(sx(t))},${px(sy(column[i]))}`)
      .join(" ");
    const dash = series.dash ? ` stroke-dasharray="${series.dash}"` : "";
    parts.push(
      `<polyline class="series" data-source="${escapeXml(series.file)}" ` +
        `data-column="${series.column}" data-label="${escapeXml(series.label)}" ` +
        `data-t="${escapeXml(curve.raw.tPrime.join(" "))}" ` +
        `data-y="${escapeXml(rawColumn.join(" "))}" ` +
        `fill="none" stroke="${series.color}" stroke-width="1.5"${dash} ` +
        `clip-path="url(#plot-area)" points="${points}"/>`,
    );
  }

  // legend
  const legendX = MARGIN.left + PLOT_W + 16;
  spec.series.forEach((series: SeriesSpec, index: number) => {
    const y = MARGIN.top + 10 + index * 18;
    const dash = series.dash ? ` stroke-dasharray="${series.dash}"` : "";
    parts.push(
      `<line x1="${legendX}" y1="${y}" x2="${legendX + 26}" y2="${y}" ` +
        `stroke="${series.color}" stroke-width="2"${dash}/>`,
    );
    parts.push(
      `<text x="${legendX + 32}" y="${y + 4}">${escapeXml(series.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
