import { mount } from "./app.js";

const root = document.getElementById("app");
if (root) {
  mount(root).catch((err) => {
    root.textContent = `Failed to reach the curation service: ${err}`;
  });
}
