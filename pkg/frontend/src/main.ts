import { ApiClient } from "./api.js";
import { createApp } from "./view.js";

const root = document.getElementById("app");
if (root) {
  createApp(root, new ApiClient());
}
