import "./style.css";
import { App } from "./app";

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) {
    throw new Error("missing #app mount point");
  }
  const app = new App(root);
  try {
    await app.start();
  } catch (err) {
    root.innerHTML = `<p class="boot-error">could not start a session: ${String(err)}</p>`;
  }
}

window.addEventListener("load", () => void boot());
