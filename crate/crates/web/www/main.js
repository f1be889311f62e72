import init, { circle_sets, gm_returns, spiral_nw } from "./pkg/reclab_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const COLORS = { NW: "#d62728", GR_approx: "#ff7f0e", SCR: "#2ca02c", Mane: "#1f77b4", CR: "#9467bd" };

function run(info, f) {
  try {
    f();
    $(info).classList.remove("error");
  } catch (e) {
    $(info).textContent = String(e);
    $(info).classList.add("error");
  }
}

// One ring per set, innermost NW, outermost CR; a cell is filled when it is a member.
function drawCircle() {
  const d = JSON.parse(circle_sets($("c-map").value, num("c-n"), num("c-eps"), 200));
  const cv = $("c-canvas"), ctx = cv.getContext("2d");
  ctx.clearRect(0, 0, cv.width, cv.height);
  const cx = cv.width / 2, cy = cv.height / 2, w = 16;
  d.sets.forEach((s, k) => {
    const r = 90 + k * (w + 8);
    const inside = new Set(s.members);
    for (let i = 0; i < d.n; i++) {
      const a0 = (i - 0.5) / d.n * 2 * Math.PI, a1 = (i + 0.5) / d.n * 2 * Math.PI;
      ctx.beginPath();
      ctx.arc(cx, cy, r, -a0, -a1, true);
      ctx.arc(cx, cy, r + w, -a1, -a0, false);
      ctx.closePath();
      ctx.fillStyle = inside.has(i) ? COLORS[s.kind] : "#f2f2f2";
      ctx.fill();
    }
  });
  $("c-legend").innerHTML = d.sets
    .map((s) => `<span><i style="background:${COLORS[s.kind]}"></i>${s.kind} ${s.members.length}</span>`)
    .join("");
  $("c-info").textContent =
    `${d.system}, eps = ${d.eps.toFixed(4)}; inclusion chain ${d.chain_holds ? "holds" : "VIOLATED"} (inner ring NW, outer ring CR)`;
}

// Rows: M, return times of V, swap return times, common return times.
function drawGm() {
  const d = JSON.parse(gm_returns($("g-m").value, num("g-h")));
  const cv = $("g-canvas"), ctx = cv.getContext("2d");
  ctx.clearRect(0, 0, cv.width, cv.height);
  const rows = [["M", d.m, "#555"], ["g_M: V", d.times, "#1f77b4"], ["swap", d.swap_times, "#2ca02c"], ["product", d.common, "#d62728"]];
  const left = 70, step = (cv.width - left - 10) / d.horizon;
  ctx.font = "12px system-ui";
  rows.forEach(([name, times, color], k) => {
    const y = 10 + k * 34;
    ctx.fillStyle = "#222";
    ctx.fillText(name, 4, y + 16);
    ctx.fillStyle = "#f2f2f2";
    ctx.fillRect(left, y, d.horizon * step, 24);
    ctx.fillStyle = color;
    for (const t of times) if (t <= d.horizon) ctx.fillRect(left + (t - 1) * step, y, Math.max(step - 1, 1), 24);
  });
  $("g-info").textContent =
    `${d.points} points; ${d.times.length} return times of V up to ${d.horizon}; ` +
    (d.common.length ? `V x {0} returns at ${d.common.slice(0, 8).join(", ")}...` : "V x {0} never returns: (y, 0) is wandering");
}

// Cells as dots; filled red when nonwandering.
function drawSpiral() {
  const d = JSON.parse(spiral_nw(num("s-r"), num("s-a"), num("s-eps"), num("s-h")));
  const cv = $("s-canvas"), ctx = cv.getContext("2d");
  ctx.clearRect(0, 0, cv.width, cv.height);
  const s = cv.width / 2 - 14, cx = cv.width / 2, cy = cv.height / 2;
  const nw = new Set(d.members);
  const rad = Math.max(2, Math.min(7, 0.4 * s * Math.PI * 2 / d.n_a));
  d.coords.forEach(([x, y], i) => {
    ctx.beginPath();
    ctx.arc(cx + x * s, cy - y * s, nw.has(i) ? rad : rad * 0.5, 0, 2 * Math.PI);
    ctx.fillStyle = nw.has(i) ? "#d62728" : "#bbb";
    ctx.fill();
  });
  $("s-info").textContent = `${d.system}: ${d.members.length} of ${d.coords.length} cells nonwandering at eps = ${d.eps.toFixed(4)}`;
}

await init();
$("status").textContent = "";
$("c-run").onclick = () => run("c-info", drawCircle);
$("g-run").onclick = () => run("g-info", drawGm);
$("s-run").onclick = () => run("s-info", drawSpiral);
run("c-info", drawCircle);
run("g-info", drawGm);
run("s-info", drawSpiral);
