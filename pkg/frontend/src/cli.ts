/** CLI entry: render --spec <path>. */

import { loadSpec, render } from "./render.js";

function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (command !== "render") {
    console.error("usage: render --spec <figure-spec.json>");
    return 2;
  }
  const flagIndex = rest.indexOf("--spec");
  if (flagIndex < 0 || flagIndex + 1 >= rest.length) {
    console.error("usage: render --spec <figure-spec.json>");
    return 2;
  }
  try {
    const result = render(loadSpec(rest[flagIndex + 1]));
    console.log(`wrote ${result.image} and ${result.sidecar}`);
    return 0;
  } catch (error) {
    console.error(String(error instanceof Error ? error.message : error));
    return 1;
  }
}

process.exit(main(process.argv.slice(2)));
