import init, { extremeCurve, leviProfile, orbitSequence } from "./pkg/dpsqueeze_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

// Line plot with log-scaled x (and optionally y) axes.
function plot(canvas, xs, ys, { logY = false, xLabel = "", yLabel = "" } = {}) {
  const g = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 48;
  g.clearRect(0, 0, w, h);
  const fx = xs.map(Math.log10);
  const fy = logY ? ys.map((y) => Math.log10(Math.max(y, 1e-300))) : ys;
  const [x0, x1] = [Math.min(...fx), Math.max(...fx)];
  let [y0, y1] = [Math.min(...fy), Math.max(...fy)];
  if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }
  const px = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const py = (y) => h - pad + ((y - y0) / (y1 - y0)) * (2 * pad - h);
  g.strokeStyle = "#999";
  g.strokeRect(pad, pad / 2, w - 2 * pad, h - 1.5 * pad);
  g.fillStyle = "#444";
  g.font = "12px sans-serif";
  g.fillText(xLabel + " (log)", w / 2 - 20, h - 12);
  g.fillText(yLabel + (logY ? " (log)" : ""), 4, 14);
  const fmt = (v, log) => (log ? "1e" + v.toFixed(1) : v.toPrecision(3));
  g.fillText(fmt(x0, true), pad, h - pad + 16);
  g.fillText(fmt(x1, true), w - pad - 30, h - pad + 16);
  g.fillText(fmt(y0, logY), 2, h - pad);
  g.fillText(fmt(y1, logY), 2, pad / 2 + 10);
  g.strokeStyle = "#1463a5";
  g.lineWidth = 2;
  g.beginPath();
  fx.forEach((x, i) => (i ? g.lineTo(px(x), py(fy[i])) : g.moveTo(px(x), py(fy[i]))));
  g.stroke();
}

function guarded(out, f) {
  try {
    f();
  } catch (e) {
    $(out).textContent = "error: " + (e.message || e);
  }
}

function runExtreme() {
  guarded("ex-out", () => {
    const pts = JSON.parse(extremeCurve(num("ex-m"), num("ex-r"), num("ex-rp"), num("ex-c"), 40));
    plot($("ex-plot"), pts.map((p) => p.t), pts.map((p) => p.bound), { xLabel: "t", yLabel: "bound" });
    const near = pts[0], far = pts[pts.length - 1];
    $("ex-out").textContent =
      `t = ${near.t.toExponential(2)}: bound ${near.bound.toFixed(6)}, δ ${near.delta.toFixed(6)}\n` +
      `t = ${far.t.toFixed(3)}: bound ${far.bound.toFixed(6)}, δ ${far.delta.toFixed(6)}`;
  });
}

function runLevi() {
  $("lv-kv").textContent = $("lv-k").value;
  guarded("lv-out", () => {
    const pts = JSON.parse(leviProfile(num("lv-m"), num("lv-k"), 40));
    plot($("lv-plot"), pts.map((p) => p.s), pts.map((p) => p.min_eig), { logY: true, xLabel: "s", yLabel: "min eigenvalue" });
    const lo = pts[0];
    $("lv-out").textContent = `s = ${lo.s.toExponential(1)}: ${lo.min_eig.toExponential(3)}; all positive: ${pts.every((p) => p.min_eig > 0)}`;
  });
}

function runOrbit() {
  $("or-sv").textContent = $("or-s").value;
  guarded("or-out", () => {
    const t = JSON.parse(orbitSequence(num("or-m"), num("or-s"), num("or-n")));
    plot($("or-plot"), t.j, t.ratio.map((r) => Math.max(r, 1e-16)), { logY: true, xLabel: "j", yLabel: "P(a′)/gap" });
    const last = t.ratio.length - 1;
    $("or-out").textContent =
      `${t.case}: final ratio ${t.ratio[last].toExponential(3)}, P(b_j) ${t.p_image[last].toFixed(6)}\n${t.rule}`;
  });
}

await init();
$("ex-run").addEventListener("click", runExtreme);
for (const id of ["lv-m", "lv-k"]) $(id).addEventListener("input", runLevi);
for (const id of ["or-m", "or-s", "or-n"]) $(id).addEventListener("change", runOrbit);
$("or-s").addEventListener("input", runOrbit);
runExtreme();
runLevi();
runOrbit();
