// Expects the bindings generated by `wasm-bindgen --target web` in ./pkg.
import init, { wigner_grid, qfi_curve, phase_scaling_table, log_log_slope } from "./pkg/qcrb_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function state() {
  return ["alpha", "psi", "r", "chi", "n_th"].map(num);
}

function report(id, fn) {
  try {
    $(id).classList.remove("err");
    $(id).textContent = fn() ?? "";
  } catch (e) {
    $(id).classList.add("err");
    $(id).textContent = String(e.message ?? e);
  }
}

function drawWigner() {
  report("wigner-info", () => {
    const canvas = $("wigner");
    const size = canvas.width;
    const extent = num("extent");
    const w = wigner_grid(...state(), extent, size);
    let lo = Infinity, hi = -Infinity;
    for (const v of w) { lo = Math.min(lo, v); hi = Math.max(hi, v); }
    const ctx = canvas.getContext("2d");
    const img = ctx.createImageData(size, size);
    for (let i = 0; i < w.length; i++) {
      const t = hi > 0 ? w[i] / hi : 0;
      img.data[4 * i] = 255 * (1 - t) ** 0.5 | 0;
      img.data[4 * i + 1] = 255 * (1 - t) | 0;
      img.data[4 * i + 2] = 255;
      img.data[4 * i + 3] = 255;
    }
    ctx.putImageData(img, 0, 0);
    return `x, p in [-${extent}, ${extent}]   peak W = ${hi.toExponential(4)}`;
  });
}

// Line plot with optional log axes. `series` is a list of [xs, ys, colour].
function plot(canvas, series, { logX = false, logY = false } = {}) {
  const ctx = canvas.getContext("2d");
  const { width: W, height: H } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, W, H);
  const tx = logX ? Math.log10 : (v) => v;
  const ty = logY ? Math.log10 : (v) => v;
  const pts = series.flatMap(([xs, ys]) => xs.map((x, i) => [tx(x), ty(ys[i])]))
    .filter(([x, y]) => Number.isFinite(x) && Number.isFinite(y));
  if (pts.length === 0) return;
  let [x0, x1, y0, y1] = [Infinity, -Infinity, Infinity, -Infinity];
  for (const [x, y] of pts) { x0 = Math.min(x0, x); x1 = Math.max(x1, x); y0 = Math.min(y0, y); y1 = Math.max(y1, y); }
  if (y1 === y0) { y0 -= 1; y1 += 1; }
  if (x1 === x0) { x0 -= 1; x1 += 1; }
  const sx = (x) => pad + (x - x0) / (x1 - x0) * (W - 2 * pad);
  const sy = (y) => H - pad - (y - y0) / (y1 - y0) * (H - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, W - 2 * pad, H - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.font = "11px sans-serif";
  const label = (v, log) => log ? `1e${v.toFixed(1)}` : v.toPrecision(3);
  ctx.fillText(label(x0, logX), pad, H - pad + 14);
  ctx.fillText(label(x1, logX), W - pad - 30, H - pad + 14);
  ctx.fillText(label(y1, logY), 2, pad + 4);
  ctx.fillText(label(y0, logY), 2, H - pad);
  for (const [xs, ys, colour] of series) {
    ctx.strokeStyle = colour;
    ctx.beginPath();
    let pen = false;
    xs.forEach((x, i) => {
      const [u, v] = [tx(x), ty(ys[i])];
      if (!Number.isFinite(u) || !Number.isFinite(v)) { pen = false; return; }
      pen ? ctx.lineTo(sx(u), sy(v)) : ctx.moveTo(sx(u), sy(v));
      pen = true;
    });
    ctx.stroke();
  }
}

function drawCurve() {
  report("curve-info", () => {
    const flat = qfi_curve($("family").value, $("input").value, num("start"), num("stop"), 200, ...state());
    const xs = [], ys = [];
    for (let i = 0; i < flat.length; i += 2) { xs.push(flat[i]); ys.push(flat[i + 1]); }
    plot($("curve"), [[xs, ys, "#1f5fbf"]]);
    const swept = $("family").value === "loss_eta" ? "eta" : $("input").value;
    const finite = ys.filter(Number.isFinite);
    return `I_${$("family").value} against ${swept}; max ${Math.max(...finite).toPrecision(6)}`;
  });
}

function drawScaling() {
  report("scaling-info", () => {
    const rows = (coherent) => {
      const t = phase_scaling_table(num("n-lo"), num("n-hi"), 25, coherent);
      const n = [], d = [];
      for (let i = 0; i < t.length; i += 6) { n.push(t[i]); d.push(t[i + 5]); }
      return [n, d];
    };
    const [n, best] = rows(false);
    const [, coherent] = rows(true);
    plot($("scaling"), [[n, best, "#1f5fbf"], [n, coherent, "#c0392b"]], { logX: true, logY: true });
    const [sb] = log_log_slope(n, best);
    const [sc] = log_log_slope(n, coherent);
    return `blue: optimal split, slope ${sb.toFixed(4)}\nred: coherent only, slope ${sc.toFixed(4)}`;
  });
}

await init();
for (const id of ["alpha", "psi", "r", "chi", "n_th", "extent"]) {
  $(id).addEventListener("input", () => { drawWigner(); drawCurve(); });
}
for (const id of ["family", "input", "start", "stop"]) {
  $(id).addEventListener("input", drawCurve);
}
$("scale").addEventListener("click", drawScaling);
drawWigner();
drawCurve();
drawScaling();
