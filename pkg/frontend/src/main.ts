// Bootstrap: login by name, keep the bearer token in sessionStorage, and
// hand the main region to the session controller.

import { TutorClient } from "./api.js";
import { SessionController } from "./controller.js";
import { renderFaq } from "./views.js";

const BASE_URL = (window as { TUTOR_BASE_URL?: string }).TUTOR_BASE_URL ?? "";

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const client = new TutorClient(BASE_URL);
  const main = byId<HTMLElement>("main");
  const loginForm = byId<HTMLFormElement>("login");
  const nameInput = byId<HTMLInputElement>("learner-name");
  const nav = byId<HTMLElement>("nav");

  let controller: SessionController | null = null;

  loginForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    const name = nameInput.value.trim();
    if (!name) return;
    const registered = await client.register(name);
    sessionStorage.setItem("tutor_token", registered.token);
    sessionStorage.setItem("tutor_learner", registered.learner_id);
    loginForm.hidden = true;
    nav.hidden = false;
    controller = new SessionController(client, registered.learner_id, main);
    await controller.start();
  });

  byId<HTMLButtonElement>("nav-session").addEventListener("click", () => controller?.refresh());
  byId<HTMLButtonElement>("nav-progress").addEventListener("click", () => controller?.showProgress());
  byId<HTMLButtonElement>("nav-faq").addEventListener("click", async () => {
    const faq = await client.faq();
    main.replaceChildren(renderFaq(faq.items));
  });
}

boot().catch((error) => {
  console.error(error);
  document.body.append(`failed to start: ${error}`);
});
