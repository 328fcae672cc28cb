/** Browser bootstrap: wires the store and renderers to the DOM. */

import { ApiClient } from "./api.js";
import { mapKey } from "./keyboard.js";
import { renderProgressPanel, renderQueue, renderStatusBar } from "./render.js";
import { ScreeningStore } from "./state.js";

const api = new ApiClient("");
const store = new ScreeningStore(api);

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function redraw(): void {
  $("queue").innerHTML = renderQueue(store.state);
  $("status").innerHTML = renderStatusBar(store.state);
  $("progress").innerHTML = renderProgressPanel(store.state.progress);
  const err = store.state.lastError;
  $("error").textContent = err ?? "";
}

async function boot(): Promise<void> {
  store.subscribe(redraw);
  const params = new URLSearchParams(window.location.search);
  const sessionId = params.get("session");
  if (sessionId) {
    await store.load(sessionId);
    return;
  }
  const corpusId = params.get("corpus");
  const srId = params.get("sr");
  const seeds = params.get("seeds");
  if (corpusId && srId && seeds) {
    await store.createSession({
      corpus_id: corpusId,
      sr_id: srId,
      seed_doc_ids: seeds.split(","),
      model: params.get("model") ?? "mmatch",
    });
    const url = new URL(window.location.href);
    url.search = `?session=${store.state.sessionId}`;
    window.history.replaceState(null, "", url);
    return;
  }
  $("queue").innerHTML =
    `<div class="empty">Open with ?session=&lt;id&gt; or ` +
    `?corpus=&lt;id&gt;&amp;sr=&lt;topic&gt;&amp;seeds=&lt;doc,doc&gt;</div>`;
}

window.addEventListener("keydown", (event) => {
  if (event.target instanceof HTMLInputElement || event.target instanceof HTMLTextAreaElement) {
    return;
  }
  const action = mapKey(event.key);
  if (!action) return;
  event.preventDefault();
  switch (action.kind) {
    case "label":
      store.labelAtCursor(action.label);
      break;
    case "move":
      store.moveCursor(action.delta);
      break;
    case "undo": {
      const doc = store.docAtCursor();
      if (doc) store.unqueueLabel(doc);
      break;
    }
    case "submit":
      void store.submitAndRerank();
      break;
  }
});

document.addEventListener("DOMContentLoaded", () => {
  $("submit").addEventListener("click", () => void store.submitAndRerank());
  void boot();
});
