#!/usr/bin/env node
/** render_figs --in DIR --out DIR --which {3,4,5,all} */

import { renderMany } from "./render.js";

const USAGE = "usage: render_figs --in DIR --out DIR --which {3,4,5,all}";

function parseArgs(argv: string[]): { inDir: string; outDir: string; which: string } {
  let inDir = "";
  let outDir = "";
  let which = "all";
  for (let i = 0; i < argv.length; i += 1) {
    const arg = argv[i];
    if (arg === "--in" || arg === "--out" || arg === "--which") {
      const value = argv[i + 1];
      if (value === undefined) {
        throw new Error(`${arg} needs a value`);
      }
      if (arg === "--in") inDir = value;
      else if (arg === "--out") outDir = value;
      else which = value;
      i += 1;
    } else {
      throw new Error(`unknown argument: ${arg}`);
    }
  }
  if (!inDir || !outDir) {
    throw new Error("--in and --out are required");
  }
  if (!["3", "4", "5", "all"].includes(which)) {
    throw new Error(`--which must be one of 3, 4, 5, all; got ${which}`);
  }
  return { inDir, outDir, which };
}

function main(): void {
  let options;
  try {
    options = parseArgs(process.argv.slice(2));
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    console.error(USAGE);
    process.exit(2);
  }
  try {
    const written = renderMany(
      options.which as "3" | "4" | "5" | "all",
      options.inDir,
      options.outDir,
    );
    for (const path of written) {
      console.log(`wrote ${path}`);
    }
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    process.exit(1);
  }
}

main();
