import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    // the e2e suite boots the Python service and runs real solves
    testTimeout: 30_000,
    hookTimeout: 60_000,
  },
});
