/**
 * Minimal deterministic SVG scene builder: fixed-precision coordinates,
 * no timestamps, so identical inputs yield byte-identical files.
 */

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { top: 40, right: 160, bottom: 56, left: 72 };

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
];

const fmt = (v: number): string => v.toFixed(2);

export class LinearScale {
  constructor(
    readonly d0: number,
    readonly d1: number,
    readonly r0: number,
    readonly r1: number,
  ) {}

  map(v: number): number {
    if (this.d1 === this.d0) {
      return (this.r0 + this.r1) / 2;
    }
    return this.r0 + ((v - this.d0) / (this.d1 - this.d0)) * (this.r1 - this.r0);
  }

  /** Round ticks covering the domain. */
  ticks(count = 5): number[] {
    const span = this.d1 - this.d0;
    if (span <= 0) return [this.d0];
    const step = Math.pow(10, Math.floor(Math.log10(span / count)));
    const err = (span / count) / step;
    const unit = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
    const s = unit * step;
    const start = Math.ceil(this.d0 / s) * s;
    const out: number[] = [];
    for (let v = start; v <= this.d1 + 1e-9; v += s) {
      out.push(Math.round(v * 1e9) / 1e9);
    }
    return out;
  }
}

export class Scene {
  private parts: string[] = [];

  rect(x: number, y: number, w: number, h: number, fill: string, stroke = "none") {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" ` +
        `fill="${fill}" stroke="${stroke}"/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1) {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
        `stroke="${stroke}" stroke-width="${width}"/>`,
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 2) {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${width}"/>`,
    );
  }

  circle(cx: number, cy: number, r: number, fill: string, opacity = 1) {
    this.parts.push(
      `<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" fill="${fill}" ` +
        `fill-opacity="${opacity}"/>`,
    );
  }

  text(
    x: number,
    y: number,
    content: string,
    opts: { size?: number; anchor?: string; rotate?: boolean } = {},
  ) {
    const size = opts.size ?? 12;
    const anchor = opts.anchor ?? "middle";
    const transform = opts.rotate
      ? ` transform="rotate(-90 ${fmt(x)} ${fmt(y)})"`
      : "";
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" ` +
        `font-family="Helvetica, Arial, sans-serif" text-anchor="${anchor}"${transform}>` +
        `${escapeXml(content)}</text>`,
    );
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}">\n<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export interface Frame {
  scene: Scene;
  x: LinearScale;
  y: LinearScale;
}

/** Axes, tick labels, title, and axis captions around a plot area. */
export function makeFrame(
  xDomain: [number, number],
  yDomain: [number, number],
  title: string,
  xLabel: string,
  yLabel: string,
): Frame {
  const scene = new Scene();
  const x = new LinearScale(xDomain[0], xDomain[1], MARGIN.left, WIDTH - MARGIN.right);
  const y = new LinearScale(yDomain[0], yDomain[1], HEIGHT - MARGIN.bottom, MARGIN.top);

  scene.text(WIDTH / 2, MARGIN.top - 16, title, { size: 15 });
  scene.line(MARGIN.left, MARGIN.top, MARGIN.left, HEIGHT - MARGIN.bottom, "#333");
  scene.line(
    MARGIN.left,
    HEIGHT - MARGIN.bottom,
    WIDTH - MARGIN.right,
    HEIGHT - MARGIN.bottom,
    "#333",
  );
  for (const t of y.ticks()) {
    const py = y.map(t);
    scene.line(MARGIN.left - 4, py, MARGIN.left, py, "#333");
    scene.line(MARGIN.left, py, WIDTH - MARGIN.right, py, "#eee");
    scene.text(MARGIN.left - 8, py + 4, trimNumber(t), { anchor: "end", size: 11 });
  }
  scene.text(WIDTH / 2, HEIGHT - 14, xLabel, { size: 13 });
  scene.text(20, HEIGHT / 2, yLabel, { size: 13, rotate: true });
  return { scene, x, y };
}

export function drawXTicks(frame: Frame, values: number[], labels?: string[]) {
  values.forEach((v, i) => {
    const px = frame.x.map(v);
    frame.scene.line(px, HEIGHT - MARGIN.bottom, px, HEIGHT - MARGIN.bottom + 4, "#333");
    frame.scene.text(px, HEIGHT - MARGIN.bottom + 18, labels ? labels[i] : trimNumber(v), {
      size: 11,
    });
  });
}

export function drawLegend(scene: Scene, entries: Array<[string, string]>) {
  entries.forEach(([label, color], i) => {
    const y = MARGIN.top + 10 + i * 20;
    const x = WIDTH - MARGIN.right + 16;
    scene.rect(x, y - 9, 12, 12, color);
    scene.text(x + 18, y + 1, label, { anchor: "start", size: 12 });
  });
}

export function trimNumber(v: number): string {
  const s = v.toPrecision(6);
  return String(Number(s));
}
