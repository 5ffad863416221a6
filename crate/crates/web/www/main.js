import init, { Demo } from "./pkg/binseg_web.js";

const HEIGHT = 160;
const WIDTH = 240;

const $ = (id) => document.getElementById(id);
const canvas = $("view");
const ctx = canvas.getContext("2d");
canvas.width = WIDTH;
canvas.height = HEIGHT;

let demo = null;

function method() {
  return document.querySelector('input[name="method"]:checked').value;
}

function render() {
  if (!demo) return;
  const k = Number($("k").value);
  const m = Number($("m").value);
  const egsK = Number($("egs-k").value);
  $("k-val").textContent = k;
  $("m-val").textContent = m;
  $("egs-k-val").textContent = egsK;

  let rgba;
  try {
    switch (method()) {
      case "superpixels": rgba = demo.superpixels(k, m); break;
      case "egs": rgba = demo.egs(1.0, egsK, 20); break;
      case "merged": rgba = demo.merged(k, $("global").checked); break;
    }
  } catch (e) {
    $("stats").textContent = `error: ${e.message ?? e}`;
    return;
  }
  ctx.putImageData(new ImageData(new Uint8ClampedArray(rgba), WIDTH, HEIGHT), 0, 0);
  const s = demo.stats;
  const merged = method() === "merged" ? ` from ${s.superpixels} superpixels` : "";
  $("stats").textContent = `${s.regions} regions${merged}, mean IoU ${(100 * s.mean_iou).toFixed(2)}%`;
}

function load() {
  if (demo) demo.free();
  demo = new Demo(Number($("seed").value), HEIGHT, WIDTH);
  render();
}

await init();
$("load").addEventListener("click", load);
for (const el of document.querySelectorAll("input")) {
  if (el.id !== "seed") el.addEventListener("input", render);
}
load();
