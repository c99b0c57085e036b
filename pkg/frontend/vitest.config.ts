import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    // The live suite talks to a spawned curation service; run files
    // serially so the two service instances never fight over state.
    fileParallelism: false,
    sequence: { concurrent: false },
    testTimeout: 20_000,
  },
});
