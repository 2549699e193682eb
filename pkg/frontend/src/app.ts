/** Browser wiring: DOM in, controller calls out.
 *
 * The page is rebuilt from the view models after every state change;
 * there is no DOM-held state beyond the input fields.
 */

import { ApiClient } from "./api.js";
import { Posteditor } from "./controller.js";
import { ATTRIBUTE_GROUPS } from "./labels.js";
import {
  attributePanelVM,
  candidatePanelVM,
  statusVM,
  traceVM,
  utteranceVM,
} from "./render.js";
import type { ViewState } from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function startApp(root: HTMLElement, baseUrl: string): Posteditor {
  const api = new ApiClient(baseUrl, (url, init) => fetch(url, init));
  const editor = new Posteditor(api, (state) => render(state));

  const controls = el("div", "controls");
  const docInput = el("textarea", "doc-input");
  docInput.rows = 6;
  docInput.placeholder = "Paste a UNL document here";
  const openBtn = el("button", "", "Open document");
  openBtn.onclick = () => void editor.open(docInput.value);

  const policySelect = el("select");
  for (const policy of ["always", "every-k", "on-demand"] as const) {
    const option = el("option", "", policy);
    option.value = policy;
    policySelect.appendChild(option);
  }
  policySelect.onchange = () =>
    void editor.setPolicy(policySelect.value as "always" | "every-k" | "on-demand", 2);

  const regenBtn = el("button", "", "Regenerate now");
  regenBtn.onclick = () => void editor.redeconvert();

  const replaceFrom = el("input");
  replaceFrom.placeholder = "replace word…";
  const replaceTo = el("input");
  replaceTo.placeholder = "…with word";
  const replaceBtn = el("button", "", "Replace everywhere");
  replaceBtn.onclick = () =>
    void editor.replaceEverywhere(replaceFrom.value.trim(), replaceTo.value.trim());

  const exportBtn = el("button", "", "Export revised UNL");
  exportBtn.onclick = () =>
    void editor.exportDocument().then((text) => {
      const blob = new Blob([text], { type: "text/plain;charset=utf-8" });
      const link = el("a");
      link.href = URL.createObjectURL(blob);
      link.download = "revised.unl";
      link.click();
      URL.revokeObjectURL(link.href);
    });

  controls.append(
    docInput,
    openBtn,
    policySelect,
    regenBtn,
    replaceFrom,
    replaceTo,
    replaceBtn,
    exportBtn,
  );

  const status = el("div", "status");
  const textPane = el("div", "text-pane");
  const sidePanel = el("div", "side-panel");
  root.append(controls, status, textPane, sidePanel);

  function render(state: ViewState): void {
    const s = statusVM(state);
    status.textContent = [
      s.policy,
      s.staleCount > 0 ? `${s.staleCount} sentence(s) need regeneration` : "",
      s.busy ? "working…" : "",
      s.error ?? "",
    ]
      .filter(Boolean)
      .join(" · ");

    textPane.replaceChildren();
    for (const view of state.utterances) {
      const vm = utteranceVM(view, state.selected);
      const line = el("p", "utterance");
      for (const badge of vm.badges) {
        line.appendChild(el("span", "badge", badge));
      }
      for (const token of vm.tokens) {
        if (token.spaceBefore) {
          line.appendChild(document.createTextNode(" "));
        }
        const span = el(
          "span",
          token.clickable ? (token.selected ? "token selected" : "token") : "punct",
          token.text,
        );
        if (token.clickable) {
          const info = view.tokens.find((t) => t.i === token.tokenIndex);
          span.onclick = () => {
            if (info) void editor.selectToken(view.id, info);
          };
        }
        line.appendChild(span);
      }
      for (const issue of vm.issues) {
        line.appendChild(el("div", "issue", issue));
      }
      textPane.appendChild(line);
    }

    sidePanel.replaceChildren();
    const candidates = candidatePanelVM(state);
    if (candidates !== null) {
      const panel = el("div", "candidates");
      panel.appendChild(el("h3", "", candidates.title));
      for (const candidate of candidates.candidates) {
        const row = el(
          "button",
          candidate.current ? "candidate current" : "candidate",
          candidate.description + (candidate.fromWidening ? " (wider search)" : ""),
        );
        row.onclick = () => void editor.choose(candidate.lu);
        panel.appendChild(row);
      }
      if (!candidates.widened) {
        const widenBtn = el("button", "widen", "Show more words");
        widenBtn.onclick = () => void editor.widen();
        panel.appendChild(widenBtn);
      }
      sidePanel.appendChild(panel);
    }

    const attributes = attributePanelVM(state);
    if (attributes !== null) {
      const panel = el("div", "attributes");
      panel.appendChild(el("h3", "", attributes.title));
      if (attributes.currentAttributes.length > 0) {
        panel.appendChild(
          el("div", "", "Currently: " + attributes.currentAttributes.join(", ")),
        );
      }
      for (const group of ATTRIBUTE_GROUPS) {
        const row = el("div", "attr-group", group.label + ": ");
        for (const option of group.options) {
          const btn = el("button", "", option.label);
          btn.onclick = () => void editor.setAttribute(option.attr, null, "interlingual");
          row.appendChild(btn);
        }
        panel.appendChild(row);
      }
      for (const style of attributes.styleOptions) {
        const btn = el("button", "style", style.label);
        btn.onclick = () => void editor.setAttribute(style.name, style.value, "style");
        panel.appendChild(btn);
      }
      sidePanel.appendChild(panel);

      const trace = el("div", "trace");
      trace.appendChild(el("h3", "", "Where this word comes from"));
      for (const row of traceVM(state.trace)) {
        trace.appendChild(el("div", "", `${row.stage}: ${row.summary}`));
      }
      sidePanel.appendChild(trace);
    }
  }

  render(editor.state);
  return editor;
}
