import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    include: ["tests/**/*.test.ts"],
    testTimeout: 120_000,
    hookTimeout: 60_000,
    // The live end-to-end test owns a server process; keep files sequential
    // so two test files never race for the same port.
    fileParallelism: false,
  },
});
