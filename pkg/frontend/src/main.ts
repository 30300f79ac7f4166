/**
 * Browser entry point: binds the page controls to a {@link SpellerApp}.
 *
 * The API base defaults to the page origin and can be overridden with
 * `?api=http://host:port` for a service running elsewhere.
 */

import { ApiError, SpellerClient } from "./api.js";
import { SpellerApp } from "./app.js";

const DEMO_KB_NAME = "demo";
const DEMO_PHRASEBOOK = [
  "piace_tanto_alla_gente.",
  "il_cinema_piace_alla_gente.",
  "la_musica_piace_tanto.",
  "tanto_va_la_gatta_al_lardo.",
  "alla_fine_va_bene.",
  "la_gente_canta.",
  "va_bene_cosi.",
].join("\n");

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
}

function setStatus(text: string): void {
  byId<HTMLElement>("status").textContent = text;
}

async function guard(work: () => Promise<void>): Promise<void> {
  try {
    await work();
  } catch (error) {
    if (error instanceof ApiError) {
      setStatus(error.detail);
    } else {
      setStatus(String(error));
    }
  }
}

function main(): void {
  const params = new URLSearchParams(window.location.search);
  const apiBase = params.get("api") ?? window.location.origin;
  byId<HTMLInputElement>("api-base").value = apiBase;

  let client = new SpellerClient(apiBase);
  let app: SpellerApp | null = null;
  const root = byId<HTMLElement>("speller-root");

  const refreshKbs = async (): Promise<void> => {
    const select = byId<HTMLSelectElement>("kb-select");
    const previous = select.value;
    const kbs = await client.listKbs();
    select.textContent = "";
    for (const kb of kbs) {
      const option = document.createElement("option");
      option.value = kb.name;
      option.textContent = `${kb.name} (${kb.sentences} sentences, ${kb.distinct_words} words)`;
      select.appendChild(option);
    }
    if (kbs.some((kb) => kb.name === previous)) {
      select.value = previous;
    }
    setStatus(`${kbs.length} knowledge base(s) available`);
  };

  byId<HTMLInputElement>("api-base").addEventListener("change", (event) => {
    client = new SpellerClient((event.target as HTMLInputElement).value);
    void guard(refreshKbs);
  });

  byId<HTMLButtonElement>("refresh-kbs").addEventListener("click", () => {
    void guard(refreshKbs);
  });

  byId<HTMLButtonElement>("upload-demo").addEventListener("click", () => {
    void guard(async () => {
      try {
        await client.uploadKb(DEMO_KB_NAME, DEMO_PHRASEBOOK);
      } catch (error) {
        if (!(error instanceof ApiError && error.status === 409)) {
          throw error; // 409 = already uploaded; anything else is real
        }
      }
      await refreshKbs();
      byId<HTMLSelectElement>("kb-select").value = DEMO_KB_NAME;
    });
  });

  byId<HTMLButtonElement>("new-session").addEventListener("click", () => {
    void guard(async () => {
      const kb = byId<HTMLSelectElement>("kb-select").value;
      if (kb === "") {
        setStatus("upload or select a knowledge base first");
        return;
      }
      app?.dispose();
      app = new SpellerApp(root, client, {
        flashing: byId<HTMLInputElement>("opt-flashing").checked,
      });
      const state = await app.start({
        kb,
        predictions: byId<HTMLInputElement>("opt-predictions").checked,
        p_sharp: Number(byId<HTMLInputElement>("opt-psharp").value),
        ppd_s: Number(byId<HTMLInputElement>("opt-ppd").value),
      });
      setStatus(`session ${state.id.slice(0, 8)}… on "${state.kb}"`);
      root.focus();
    });
  });

  byId<HTMLButtonElement>("undo").addEventListener("click", () => {
    void app?.undo();
  });

  byId<HTMLButtonElement>("mark-error").addEventListener("click", () => {
    app?.markError();
    setStatus("next selection will be reported as a misrecognition");
  });

  byId<HTMLInputElement>("opt-flashing").addEventListener("change", (event) => {
    app?.setFlashing((event.target as HTMLInputElement).checked);
  });

  byId<HTMLButtonElement>("end-session").addEventListener("click", () => {
    void guard(async () => {
      const id = app?.sessionState?.id;
      if (app !== null && id !== undefined) {
        await client.deleteSession(id);
        app.dispose();
        app = null;
        root.textContent = "";
        setStatus("session closed");
      }
    });
  });

  void guard(refreshKbs);
}

main();
