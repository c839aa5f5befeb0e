export { CsvError, GridData, GridMode, GridPoint, parseGrid,
         readGrid } from "./csv";
export { Rgba, divergingRedBlue, grayscale, hslToRgb,
         phaseLightness } from "./color";
export { Image, encodePng } from "./png";
export { RenderResult, STYLES, Style, renderImage } from "./render";
