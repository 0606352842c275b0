import { SessionApi } from "./api.js";
import { ConversationApp } from "./app.js";

const baseUrl =
  document.documentElement.dataset.apiBase ?? "http://127.0.0.1:8080";

const app = new ConversationApp(new SessionApi(baseUrl), document);
app.start().catch((err) => {
  const banner = document.querySelector<HTMLElement>("#banner");
  const message = document.querySelector<HTMLElement>("#banner-message");
  if (banner && message) {
    message.textContent = `could not reach ${baseUrl}: ${err}`;
    banner.hidden = false;
  }
});
