import { defineConfig } from "vitest/config";

export default defineConfig({
  resolve: {
    // Source files import with explicit .js extensions (native browser ESM);
    // strip them so vite resolves back to the .ts sources under test.
    alias: [{ find: /^(\.{1,2}\/.*)\.js$/, replacement: "$1" }],
  },
  test: {
    include: ["tests/**/*.test.ts"],
    testTimeout: 180_000,
    hookTimeout: 180_000,
  },
});
