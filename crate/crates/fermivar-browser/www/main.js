import init, { experiments, defaultConfig, runExperiment } from "./pkg/fermivar_browser.js";

const $ = (id) => document.getElementById(id);

function showRecord(out) {
  const { record, tables } = out;
  $("status").textContent = record.error ? `${record.status}: ${record.error}` : record.status;
  const rows = record.metrics.map((m) => {
    const bound = m.bound ? (m.bound.kind === "holds" ? "holds" : `${m.bound.kind} ${m.bound.limit}`) : "";
    return `<tr class="${m.verdict}"><td>${m.verdict}</td><td>${m.name}</td><td>${m.value ?? "non-finite"}</td>`
      + `<td>${m.unit}</td><td>${bound}</td></tr>`;
  });
  $("metrics").innerHTML = "<tr><th>verdict</th><th>metric</th><th>value</th><th>unit</th><th>bound</th></tr>" + rows.join("");
  $("tables").innerHTML = "";
  for (const [name, csv] of Object.entries(tables)) {
    const link = document.createElement("a");
    link.href = URL.createObjectURL(new Blob([csv], { type: "text/csv" }));
    link.download = name;
    link.textContent = name;
    $("tables").append(link, " ");
  }
}

await init();
for (const name of experiments()) {
  $("experiment").append(new Option(name, name));
}
const load = () => { $("config").value = defaultConfig($("experiment").value); };
$("experiment").addEventListener("change", load);
$("run").addEventListener("click", () => {
  $("status").textContent = "running…";
  // Let the status repaint before the synchronous run starts.
  setTimeout(() => {
    try {
      showRecord(JSON.parse(runExperiment($("config").value)));
    } catch (err) {
      $("status").textContent = String(err.message ?? err);
    }
  }, 0);
});
load();
