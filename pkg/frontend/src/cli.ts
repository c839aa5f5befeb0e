/** `plotrender render --in grid.csv --style phase_lightness --out fig.png` */

import * as fs from "node:fs";
import yargs from "yargs";
import { CsvError, readGrid } from "./csv";
import { encodePng } from "./png";
import { STYLES, Style, renderImage } from "./render";

export async function run(argv: string[]): Promise<number> {
  let exitCode = 0;
  const parser = yargs(argv)
    .scriptName("plotrender")
    .command(
      "render",
      "render a distribution grid CSV to a PNG figure",
      (cmd) =>
        cmd
          .option("in", { type: "string", demandOption: true,
                          describe: "input grid CSV" })
          .option("style", { choices: STYLES, demandOption: true })
          .option("out", { type: "string", demandOption: true,
                           describe: "output PNG path" })
          .option("scale", { type: "number", default: 1,
                             describe: "pixels per grid cell" }),
      (args) => {
        try {
          const grid = readGrid(args.in);
          const { image, texts } = renderImage(grid, args.style as Style,
                                               args.scale);
          fs.writeFileSync(args.out, encodePng(image, texts));
          process.stdout.write(
            `wrote ${image.width}x${image.height} ${args.style} `
            + `image to ${args.out}\n`);
        } catch (err) {
          if (err instanceof CsvError) {
            process.stderr.write(`invalid input: ${err.message}\n`);
          } else {
            process.stderr.write(`render failed: ${(err as Error).message}\n`);
          }
          exitCode = 1;
        }
      })
    .demandCommand(1)
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      process.stderr.write(`${msg ?? err?.message}\n`);
      exitCode = 2;
    });
  await parser.parseAsync();
  return exitCode;
}

if (require.main === module) {
  run(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
