/**
 * The five figure kinds, each a pure function from a parsed harness CSV to
 * SVG markup. Input schemas are validated up front; a SchemaError names the
 * expected and found columns.
 */

import { requireColumns, num, Table, SchemaError } from "./csv.js";
import {
  HEIGHT,
  MARGIN,
  PALETTE,
  Scene,
  WIDTH,
  drawLegend,
  drawXTicks,
  makeFrame,
  trimNumber,
} from "./svg.js";

type Renderer = (table: Table) => string;

function uniqueInOrder(values: string[]): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  for (const v of values) {
    if (!seen.has(v)) {
      seen.add(v);
      out.push(v);
    }
  }
  return out;
}

function colorFor(names: string[]): Map<string, string> {
  const map = new Map<string, string>();
  names.forEach((n, i) => map.set(n, PALETTE[i % PALETTE.length]));
  return map;
}

/** Grouped bars of mean total SE per sweep point, one bar per algorithm. */
export function sumSeBars(table: Table): string {
  const col = requireColumns(table, [
    "axis_value",
    "algorithm",
    "mean_total_se",
    "std_total_se",
  ]);
  const axisValues = uniqueInOrder(table.rows.map((r) => r[col.get("axis_value")!]));
  const algorithms = uniqueInOrder(table.rows.map((r) => r[col.get("algorithm")!]));
  const colors = colorFor(algorithms);

  let top = 0;
  const bars = new Map<string, { mean: number; std: number }>();
  for (const r of table.rows) {
    const mean = num(r[col.get("mean_total_se")!]);
    const std = num(r[col.get("std_total_se")!]);
    bars.set(`${r[col.get("axis_value")!]}|${r[col.get("algorithm")!]}`, { mean, std });
    top = Math.max(top, mean + std);
  }

  const frame = makeFrame([0, 1], [0, top * 1.08], "Total spectral efficiency",
    "sweep point", "total SE (bits/s/Hz)");
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const groupW = plotW / axisValues.length;
  const barW = (groupW * 0.8) / algorithms.length;
  const y0 = HEIGHT - MARGIN.bottom;

  axisValues.forEach((av, gi) => {
    const gx = MARGIN.left + gi * groupW + groupW * 0.1;
    algorithms.forEach((algo, ai) => {
      const entry = bars.get(`${av}|${algo}`);
      if (!entry) return;
      const x = gx + ai * barW;
      const yTop = frame.y.map(entry.mean);
      frame.scene.rect(x, yTop, barW * 0.92, y0 - yTop, colors.get(algo)!);
      if (entry.std > 0) {
        const cx = x + barW * 0.46;
        const yHi = frame.y.map(entry.mean + entry.std);
        const yLo = frame.y.map(Math.max(0, entry.mean - entry.std));
        frame.scene.line(cx, yHi, cx, yLo, "#333");
        frame.scene.line(cx - 3, yHi, cx + 3, yHi, "#333");
        frame.scene.line(cx - 3, yLo, cx + 3, yLo, "#333");
      }
    });
    frame.scene.text(MARGIN.left + gi * groupW + groupW / 2, y0 + 18, av, { size: 11 });
  });
  drawLegend(frame.scene, algorithms.map((a) => [a, colors.get(a)!]));
  return frame.scene.render();
}

/** Best-fitness trajectories, one line per algorithm (mean over seeds). */
export function convergence(table: Table): string {
  const col = requireColumns(table, ["algorithm", "generation", "best_fitness"]);
  const algorithms = uniqueInOrder(table.rows.map((r) => r[col.get("algorithm")!]));
  const colors = colorFor(algorithms);

  const series = new Map<string, Map<number, number[]>>();
  let maxGen = 0;
  let maxFit = 0;
  for (const r of table.rows) {
    const algo = r[col.get("algorithm")!];
    const gen = num(r[col.get("generation")!]);
    const fit = num(r[col.get("best_fitness")!]);
    if (!series.has(algo)) series.set(algo, new Map());
    const byGen = series.get(algo)!;
    if (!byGen.has(gen)) byGen.set(gen, []);
    byGen.get(gen)!.push(fit);
    maxGen = Math.max(maxGen, gen);
    maxFit = Math.max(maxFit, fit);
  }

  const frame = makeFrame([0, maxGen], [0, maxFit * 1.08],
    "Convergence of the best total SE", "generation", "best total SE (bits/s/Hz)");
  drawXTicks(frame, frame.x.ticks());
  for (const algo of algorithms) {
    const byGen = series.get(algo)!;
    const gens = [...byGen.keys()].sort((a, b) => a - b);
    const pts: Array<[number, number]> = gens.map((g) => {
      const vals = byGen.get(g)!;
      const mean = vals.reduce((s, v) => s + v, 0) / vals.length;
      return [frame.x.map(g), frame.y.map(mean)];
    });
    frame.scene.polyline(pts, colors.get(algo)!);
  }
  drawLegend(frame.scene, algorithms.map((a) => [a, colors.get(a)!]));
  return frame.scene.render();
}

/** Mean optimizer wall time per sweep point. */
export function runtimeBars(table: Table): string {
  const col = requireColumns(table, ["axis_value", "algorithm", "mean_wall_time_s"]);
  const axisValues = uniqueInOrder(table.rows.map((r) => r[col.get("axis_value")!]));
  const algorithms = uniqueInOrder(table.rows.map((r) => r[col.get("algorithm")!]));
  const colors = colorFor(algorithms);

  let top = 0;
  const bars = new Map<string, number>();
  for (const r of table.rows) {
    const t = num(r[col.get("mean_wall_time_s")!]);
    bars.set(`${r[col.get("axis_value")!]}|${r[col.get("algorithm")!]}`, t);
    top = Math.max(top, t);
  }

  const frame = makeFrame([0, 1], [0, top * 1.1], "Optimizer runtime",
    "sweep point", "mean wall time (s)");
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const groupW = plotW / axisValues.length;
  const barW = (groupW * 0.8) / algorithms.length;
  const y0 = HEIGHT - MARGIN.bottom;
  axisValues.forEach((av, gi) => {
    const gx = MARGIN.left + gi * groupW + groupW * 0.1;
    algorithms.forEach((algo, ai) => {
      const t = bars.get(`${av}|${algo}`);
      if (t === undefined) return;
      const yTop = frame.y.map(t);
      frame.scene.rect(gx + ai * barW, yTop, barW * 0.92, y0 - yTop, colors.get(algo)!);
    });
    frame.scene.text(MARGIN.left + gi * groupW + groupW / 2, y0 + 18, av, { size: 11 });
  });
  drawLegend(frame.scene, algorithms.map((a) => [a, colors.get(a)!]));
  return frame.scene.render();
}

/** Mean served-UE count against the QoS threshold, per algorithm. */
export function qosServed(table: Table): string {
  const col = requireColumns(table, [
    "axis_value",
    "algorithm",
    "mean_served_ul",
    "mean_served_dl",
  ]);
  const algorithms = uniqueInOrder(table.rows.map((r) => r[col.get("algorithm")!]));
  const colors = colorFor(algorithms);

  let maxX = 0;
  let maxY = 0;
  const series = new Map<string, Array<[number, number]>>();
  for (const r of table.rows) {
    const q = num(r[col.get("axis_value")!]);
    const served =
      num(r[col.get("mean_served_ul")!]) + num(r[col.get("mean_served_dl")!]);
    const algo = r[col.get("algorithm")!];
    if (!series.has(algo)) series.set(algo, []);
    series.get(algo)!.push([q, served]);
    maxX = Math.max(maxX, q);
    maxY = Math.max(maxY, served);
  }

  const frame = makeFrame([0, maxX], [0, maxY * 1.15],
    "Served UEs against the QoS threshold", "QoS threshold (bits/s/Hz)",
    "mean served UEs");
  drawXTicks(frame, frame.x.ticks());
  for (const algo of algorithms) {
    const pts = series
      .get(algo)!
      .sort((a, b) => a[0] - b[0])
      .map(([q, s]) => [frame.x.map(q), frame.y.map(s)] as [number, number]);
    frame.scene.polyline(pts, colors.get(algo)!);
    for (const [px, py] of pts) {
      frame.scene.circle(px, py, 3.5, colors.get(algo)!);
    }
  }
  drawLegend(frame.scene, algorithms.map((a) => [a, colors.get(a)!]));
  return frame.scene.render();
}

/** Per-UE spectral efficiencies, uplink and downlink side by side. */
export function perUeScatter(table: Table): string {
  const col = requireColumns(table, [
    "link",
    "ue_index",
    "se_bits_per_s_per_hz",
    "served",
  ]);
  let maxSe = 0;
  let maxIdx = 0;
  const points: Array<{ link: string; idx: number; se: number; served: boolean }> = [];
  for (const r of table.rows) {
    const se = num(r[col.get("se_bits_per_s_per_hz")!]);
    const idx = num(r[col.get("ue_index")!]);
    points.push({
      link: r[col.get("link")!],
      idx,
      se,
      served: r[col.get("served")!] === "1" || r[col.get("served")!] === "True",
    });
    maxSe = Math.max(maxSe, se);
    maxIdx = Math.max(maxIdx, idx);
  }

  const frame = makeFrame([-0.5, 2 * (maxIdx + 1) - 0.5], [0, maxSe * 1.1],
    "Spectral efficiency per UE", "UE (uplink block, then downlink block)",
    "SE (bits/s/Hz)");
  const ulColor = PALETTE[0];
  const dlColor = PALETTE[1];
  for (const p of points) {
    const x = p.link === "UL" ? p.idx : maxIdx + 1 + p.idx;
    frame.scene.circle(frame.x.map(x), frame.y.map(p.se), 4,
      p.link === "UL" ? ulColor : dlColor, p.served ? 0.85 : 0.25);
  }
  const ticks: number[] = [];
  const labels: string[] = [];
  for (let i = 0; i <= maxIdx; i++) {
    ticks.push(i, maxIdx + 1 + i);
    labels.push(`UL${i}`, `DL${i}`);
  }
  const order = ticks.map((v, i) => i).sort((a, b) => ticks[a] - ticks[b]);
  drawXTicks(frame, order.map((i) => ticks[i]), order.map((i) => labels[i]));
  drawLegend(frame.scene, [
    ["UL (served)", ulColor],
    ["DL (served)", dlColor],
  ]);
  return frame.scene.render();
}

export const KINDS: Record<string, Renderer> = {
  sum_se_bars: sumSeBars,
  convergence: convergence,
  runtime_bars: runtimeBars,
  qos_served: qosServed,
  per_ue_scatter: perUeScatter,
};

export function render(kind: string, table: Table): string {
  const renderer = KINDS[kind];
  if (!renderer) {
    throw new SchemaError(
      `unknown figure kind '${kind}'; expected one of ${Object.keys(KINDS).join(", ")}`,
    );
  }
  return renderer(table);
}
