// Browser entry point: wires the chat controller to the DOM.

import { ApiClient } from "./client.js";
import { ChatController, ViewState } from "./view.js";

const KIND_LABEL: Record<string, string> = {
  motcle: "mot clé",
  qualificatif: "qualificatif",
  metaterme: "métaterme",
  type_ressource: "type de ressource",
};

function element<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function render(view: ViewState, controller: ChatController): void {
  const messages = document.getElementById("messages")!;
  messages.replaceChildren(
    ...view.messages.map((m) => element("div", `bubble ${m.speaker}`, m.text)),
  );
  messages.scrollTop = messages.scrollHeight;

  const chips = document.getElementById("chips")!;
  chips.replaceChildren(
    ...view.chips.map((chip) => {
      const node = element("span", `chip chip-${chip.kind}`);
      node.append(element("small", "chip-kind", KIND_LABEL[chip.kind] ?? chip.kind));
      node.append(element("span", "chip-label", chip.label));
      const remove = element("button", "chip-remove", "×");
      remove.title = `enlever ${chip.label}`;
      remove.addEventListener("click", () => void controller.removeChip(chip));
      node.append(remove);
      return node;
    }),
  );

  const qud = document.getElementById("qud")!;
  qud.replaceChildren(...view.qud.map((q) => element("li", "qud-item", q)));

  document.getElementById("subdialogue")!.textContent = view.subdialogue ?? "—";
  document.getElementById("result-count")!.textContent =
    view.resultCount === null ? "—" : String(view.resultCount);

  const banner = document.getElementById("banner")!;
  if (view.needNewSession) {
    banner.textContent = "Session perdue — cliquer pour en ouvrir une nouvelle.";
    banner.hidden = false;
  } else if (view.retryBanner) {
    banner.textContent = "Erreur réseau — votre message est conservé, réessayez.";
    banner.hidden = false;
  } else {
    banner.hidden = true;
  }

  const input = document.getElementById("input") as HTMLInputElement;
  const send = document.getElementById("send") as HTMLButtonElement;
  input.disabled = view.busy || view.closed;
  send.disabled = view.busy || view.closed || !input.value.trim();
  if (controller.pendingInput && !input.value) {
    input.value = controller.pendingInput;
    controller.pendingInput = "";
  }
}

export function boot(baseUrl = ""): ChatController {
  const controller = new ChatController(new ApiClient(baseUrl));
  controller.onChange((view) => render(view, controller));

  const input = document.getElementById("input") as HTMLInputElement;
  const send = document.getElementById("send") as HTMLButtonElement;
  const banner = document.getElementById("banner")!;

  const submit = () => {
    const text = input.value;
    input.value = "";
    void controller.send(text);
  };
  send.addEventListener("click", submit);
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter") submit();
  });
  input.addEventListener("input", () => {
    send.disabled = controller.view.busy || !input.value.trim();
  });
  banner.addEventListener("click", () => {
    if (controller.view.needNewSession) void controller.start();
  });

  void controller.start();
  return controller;
}

if (typeof document !== "undefined" && document.body?.dataset.app === "querydialog") {
  boot();
}
