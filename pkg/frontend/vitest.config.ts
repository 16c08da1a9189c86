import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    include: ["tests/**/*.test.ts"],
    // the integration suite boots the Python service, so give it room
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});
