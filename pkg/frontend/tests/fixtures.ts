import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));

export const fixtureText = (name: string): string =>
  readFileSync(join(here, "..", "fixtures", name), "utf8");
