/// <reference types="vitest/config" />
import { defineConfig } from "vite";

// In dev mode API calls are proxied to a locally running service;
// the production bundle is served by the service itself, same origin.
export default defineConfig({
  server: {
    proxy: {
      "/sessions": "http://127.0.0.1:8000",
    },
  },
  test: {
    environment: "jsdom",
  },
});
