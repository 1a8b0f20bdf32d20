import type { MaskBits, Seed } from './types.js';

export interface Point {
  x: number;
  y: number;
}

/**
 * Maps image pixels onto the canvas. Seeds and contours live in image
 * coordinates; the transform is applied only when drawing, so zooming or
 * panning never moves an annotation.
 */
export interface ViewTransform {
  scale: number; // screen pixels per image pixel
  offsetX: number; // screen x of image pixel (0, 0)
  offsetY: number;
}

export const MIN_SCALE = 0.125;
export const MAX_SCALE = 64;

export const imageToScreen = (view: ViewTransform, p: Point): Point => ({
  x: view.offsetX + p.x * view.scale,
  y: view.offsetY + p.y * view.scale,
});

export const screenToImage = (view: ViewTransform, p: Point): Point => ({
  x: (p.x - view.offsetX) / view.scale,
  y: (p.y - view.offsetY) / view.scale,
});

/** Rescale while keeping the image point under the cursor fixed. */
export function zoomAbout(view: ViewTransform, cursor: Point, factor: number): ViewTransform {
  const anchor = screenToImage(view, cursor);
  const scale = Math.min(MAX_SCALE, Math.max(MIN_SCALE, view.scale * factor));
  return {
    scale,
    offsetX: cursor.x - anchor.x * scale,
    offsetY: cursor.y - anchor.y * scale,
  };
}

export const panBy = (view: ViewTransform, dx: number, dy: number): ViewTransform => ({
  scale: view.scale,
  offsetX: view.offsetX + dx,
  offsetY: view.offsetY + dy,
});

/** Scale-to-fit with a small margin, centered in a canvas of the given size. */
export function fitView(imageW: number, imageH: number,
                        canvasW: number, canvasH: number): ViewTransform {
  const scale = Math.max(MIN_SCALE, 0.9 * Math.min(canvasW / imageW, canvasH / imageH));
  return {
    scale,
    offsetX: (canvasW - imageW * scale) / 2,
    offsetY: (canvasH - imageH * scale) / 2,
  };
}

export interface ContourOp {
  kind: 'contour';
  color: 'green' | 'black';
  points: [number, number][];
}

export interface MarkerOp {
  kind: 'marker';
  color: 'blue' | 'red';
  x: number;
  y: number;
}

export type DrawOp = ContourOp | MarkerOp;

export interface OverlayState {
  seeds: Seed[];
  segmentationContour: [number, number][] | null;
  gtMask: MaskBits | null;
}

/** Mask pixels with a 4-neighbour outside the mask (or on the frame edge). */
export function maskBoundaryPoints(mask: MaskBits): [number, number][] {
  const { width, height, bits } = mask;
  const inside = (x: number, y: number): boolean =>
    x >= 0 && x < width && y >= 0 && y < height && bits[y * width + x] !== 0;
  const points: [number, number][] = [];
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      if (bits[y * width + x] === 0) {
        continue;
      }
      if (!inside(x - 1, y) || !inside(x + 1, y) || !inside(x, y - 1) || !inside(x, y + 1)) {
        points.push([x, y]);
      }
    }
  }
  return points;
}

/**
 * Pure draw plan, later ops paint over earlier ones: reference outline in
 * black, segmentation contour in green on top, then the seed markers,
 * foreground blue and background red.
 */
export function renderPlan(state: OverlayState): DrawOp[] {
  const ops: DrawOp[] = [];
  if (state.gtMask) {
    const points = maskBoundaryPoints(state.gtMask);
    if (points.length > 0) {
      ops.push({ kind: 'contour', color: 'black', points });
    }
  }
  if (state.segmentationContour && state.segmentationContour.length > 0) {
    ops.push({ kind: 'contour', color: 'green', points: state.segmentationContour });
  }
  for (const seed of state.seeds) {
    ops.push({
      kind: 'marker',
      color: seed.label === 'fg' ? 'blue' : 'red',
      x: seed.x,
      y: seed.y,
    });
  }
  return ops;
}
