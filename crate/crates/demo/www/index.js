// Built by `wasm-pack build crates/demo --target web --out-dir www/pkg`.
import init, { profile, auditPair, equivariantFlow } from "./pkg/areaflow_demo.js";

const $ = (id) => document.getElementById(id);

function show(id, f) {
  try {
    $(id).textContent = f();
  } catch (e) {
    $(id).textContent = String(e);
  }
}

const pretty = (s) => JSON.stringify(JSON.parse(s), null, 2);

// m(t) against t, with the levels 0 and 2 marked.
function plot(csv) {
  const rows = csv.trim().split("\n").slice(1).map((r) => r.split(",").map(Number));
  const c = $("f-plot").getContext("2d");
  const { width: w, height: h } = c.canvas;
  c.clearRect(0, 0, w, h);
  if (rows.length < 2) return;
  const tMax = rows[rows.length - 1][0];
  const x = (t) => 30 + (t / tMax) * (w - 40);
  const y = (v) => h - 20 - ((v + 0.2) / 2.4) * (h - 30);
  c.strokeStyle = "#bbb";
  for (const level of [0, 2]) {
    c.beginPath();
    c.moveTo(x(0), y(level));
    c.lineTo(x(tMax), y(level));
    c.stroke();
    c.fillText(String(level), 5, y(level) + 4);
  }
  c.strokeStyle = "#c33";
  c.beginPath();
  rows.forEach(([t, m], i) => (i ? c.lineTo(x(t), y(m)) : c.moveTo(x(t), y(m))));
  c.stroke();
}

await init();

$("p-go").onclick = () =>
  show("p-out", () => {
    const l = Float64Array.from($("p-l").value.split(",").map(Number));
    return pretty(profile(+$("p-m").value, +$("p-n").value, l));
  });

$("a-go").onclick = () =>
  show("a-out", () => pretty(auditPair($("a-m").value, $("a-n").value, $("a-c").value)));

$("f-go").onclick = () =>
  show("f-out", () => {
    const csv = equivariantFlow(+$("f-m").value, +$("f-a").value, +$("f-p").value, +$("f-t").value, $("f-s").checked);
    plot(csv);
    return csv;
  });
