import init, { finite_gap_profile, finite_gap_gaps, frequencies, Wave } from "./pkg/bo_wasm_demo.js";

const $ = (id) => document.getElementById(id);
const parse = (s) => s.split(",").map((x) => x.trim()).filter((x) => x.length).map(Number);
const SAMPLES = 512;

function plot(canvas, ys, opts = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const lo = Math.min(0, ...ys), hi = Math.max(0, ...ys);
  const pad = 0.1 * (hi - lo || 1);
  const y = (v) => h - ((v - lo + pad) / (hi - lo + 2 * pad)) * h;
  const x = (i) => (opts.points ? (i + 0.5) / ys.length : i / (ys.length - 1)) * w;
  ctx.strokeStyle = "#bbb";
  ctx.beginPath(); ctx.moveTo(0, y(0)); ctx.lineTo(w, y(0)); ctx.stroke();
  ctx.strokeStyle = ctx.fillStyle = "#1f5fa8";
  if (opts.points) {
    ys.forEach((v, i) => { ctx.beginPath(); ctx.arc(x(i), y(v), 3, 0, 2 * Math.PI); ctx.fill(); });
  } else {
    ctx.beginPath();
    ys.forEach((v, i) => (i ? ctx.lineTo(x(i), y(v)) : ctx.moveTo(x(i), y(v))));
    ctx.stroke();
  }
  ctx.fillStyle = "#555";
  ctx.fillText(hi.toFixed(3), 4, 12);
  ctx.fillText(lo.toFixed(3), 4, h - 4);
}

const fmt = (xs) => Array.from(xs, (g, i) => `${i + 1}: ${g.toExponential(4)}`).join("  ");

let wave = null;
let running = false;

function draw() {
  running = false;
  try {
    const q = parse($("q").value);
    const mean = Number($("mean").value) || 0;
    plot($("profile"), Array.from(finite_gap_profile(q, SAMPLES), (v) => v + mean));
    $("gaps").textContent = fmt(finite_gap_gaps(q, 4));
    $("status").textContent = "";
  } catch (e) {
    $("status").textContent = String(e);
  }
}

function play() {
  try {
    wave = new Wave(parse($("q").value), Number($("mean").value) || 0, 256, 2e-3);
  } catch (e) {
    $("status").textContent = String(e);
    return;
  }
  running = true;
  let frame = 0;
  const tick = () => {
    if (!running) return;
    try {
      wave.advance(0.02);
    } catch (e) {
      $("status").textContent = String(e);
      running = false;
      return;
    }
    plot($("profile"), wave.profile(SAMPLES));
    $("status").textContent = `t = ${wave.time().toFixed(2)}`;
    if (frame++ % 25 === 0) $("gaps").textContent = fmt(wave.gaps(4));
    requestAnimationFrame(tick);
  };
  requestAnimationFrame(tick);
}

function curve() {
  try {
    const gamma = parse($("gamma").value);
    plot($("freq"), frequencies(gamma, Math.max(12, gamma.length + 4)), { points: true });
  } catch (e) {
    $("status").textContent = String(e);
  }
}

await init();
$("draw").onclick = draw;
$("play").onclick = play;
$("curve").onclick = curve;
draw();
curve();
