/**
 * What goes on each figure replica: input CSVs, which column of each, labels.
 *
 * fig3 - traced-out channels, F± for k in {0,2} and nbar in {0, 1e3}, with
 *        the telecloning interval marked.
 * fig4 - heterodyne-detected anti-Stokes channel, F± for nbar in {0, 1, 1e7}.
 * fig5 - mirror-complement channel, trace vs heterodyne, F- only,
 *        nbar in {0, 1e5}.
 */

export type CurveColumn = "f_plus" | "f_minus";

export interface SeriesSpec {
  file: string;
  column: CurveColumn;
  label: string;
  color: string;
  dash?: string;
}

export interface FigureSpec {
  name: string;
  title: string;
  series: SeriesSpec[];
  yRange: [number, number];
  /** JSON sidecar with the telecloning interval, when the figure marks it */
  markersFile?: string;
  output: string;
}

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#e377c2",
];

function bothSigns(
  file: string,
  tag: string,
  colorOffset: number,
  dash?: string,
): SeriesSpec[] {
  return [
    {
      file,
      column: "f_plus",
      label: `F+ ${tag}`,
      color: PALETTE[colorOffset % PALETTE.length],
      dash,
    },
    {
      file,
      column: "f_minus",
      label: `F- ${tag}`,
      color: PALETTE[(colorOffset + 1) % PALETTE.length],
      dash,
    },
  ];
}

export function figureSpec(which: 3 | 4 | 5): FigureSpec {
  if (which === 3) {
    return {
      name: "fig3",
      title: "Traced-out mode: teleportation fidelities around t' = 2π",
      series: [
        ...bothSigns("fig3_k0_trace_nbar0.csv", "k=0 nbar=0", 0),
        ...bothSigns("fig3_k0_trace_nbar1000.csv", "k=0 nbar=1e3", 0, "6 3"),
        ...bothSigns("fig3_k2_trace_nbar0.csv", "k=2 nbar=0", 2),
        ...bothSigns("fig3_k2_trace_nbar1000.csv", "k=2 nbar=1e3", 2, "6 3"),
      ],
      yRange: [0.4, 1.0],
      markersFile: "fig3_markers.json",
      output: "fig3.svg",
    };
  }
  if (which === 4) {
    return {
      name: "fig4",
      title: "Heterodyne-detected anti-Stokes mode: fidelities around t' = 2π",
      series: [
        ...bothSigns("fig4_k2_het_nbar0.csv", "k=2 het nbar=0", 0),
        ...bothSigns("fig4_k2_het_nbar1.csv", "k=2 het nbar=1", 2, "6 3"),
        ...bothSigns("fig4_k2_het_nbar1e07.csv", "k=2 het nbar=1e7", 4, "2 3"),
      ],
      yRange: [0.4, 1.0],
      output: "fig4.svg",
    };
  }
  return {
    name: "fig5",
    title: "Mirror mode traced out vs detected: F- of the optical channel",
    series: [
      {
        file: "fig5_k0_trace_nbar0.csv",
        column: "f_minus",
        label: "F- tr nbar=0",
        color: PALETTE[0],
      },
      {
        file: "fig5_k0_trace_nbar100000.csv",
        column: "f_minus",
        label: "F- tr nbar=1e5",
        color: PALETTE[0],
        dash: "6 3",
      },
      {
        file: "fig5_k0_het_nbar0.csv",
        column: "f_minus",
        label: "F- het nbar=0",
        color: PALETTE[1],
      },
      {
        file: "fig5_k0_het_nbar100000.csv",
        column: "f_minus",
        label: "F- het nbar=1e5",
        color: PALETTE[1],
        dash: "6 3",
      },
    ],
    yRange: [0.4, 1.0],
    output: "fig5.svg",
  };
}

export const ALL_FIGURES: Array<3 | 4 | 5> = [3, 4, 5];

export interface TelecloningMarkers {
  t_lo: number;
  t_hi: number;
}

export function parseMarkers(text: string, source: string): TelecloningMarkers | null {
  let parsed: unknown;
  try {
    parsed = JSON.parse(text);
  } catch (err) {
    throw new Error(`${source}: invalid JSON (${String(err)})`);
  }
  const interval = (parsed as { telecloning_interval?: unknown }).telecloning_interval;
  if (interval === null || interval === undefined) {
    return null;
  }
  const { t_lo, t_hi } = interval as { t_lo?: unknown; t_hi?: unknown };
  if (typeof t_lo !== "number" || typeof t_hi !== "number" || !(t_lo < t_hi)) {
    throw new Error(`${source}: telecloning_interval must hold numbers t_lo < t_hi`);
  }
  return { t_lo, t_hi };
}
