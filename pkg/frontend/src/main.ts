import { ApiClient, ApiError, isAbortError } from './api.js';
import {
  fitView,
  imageToScreen,
  panBy,
  renderPlan,
  screenToImage,
  zoomAbout,
  ViewTransform,
} from './overlay.js';
import { AnnotationSession, LoadedImage } from './session.js';
import { MaskBits, MethodName, SeedLabel } from './types.js';

const must = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
};

const canvas = must<HTMLCanvasElement>('view');
const ctx = canvas.getContext('2d')!;
const imageInput = must<HTMLInputElement>('image-file');
const gtInput = must<HTMLInputElement>('gt-file');
const methodSelect = must<HTMLSelectElement>('method');
const paramsBox = must<HTMLTextAreaElement>('params');
const fgButton = must<HTMLButtonElement>('label-fg');
const bgButton = must<HTMLButtonElement>('label-bg');
const runButton = must<HTMLButtonElement>('run');
const mltButton = must<HTMLButtonElement>('autoseed-mlt');
const deButton = must<HTMLButtonElement>('autoseed-de');
const undoButton = must<HTMLButtonElement>('undo');
const redoButton = must<HTMLButtonElement>('redo');
const clearButton = must<HTMLButtonElement>('clear');
const exportButton = must<HTMLButtonElement>('export');
const statusLine = must<HTMLElement>('status');
const metricsPanel = must<HTMLElement>('metrics');
const seedCount = must<HTMLElement>('seed-count');

const session = new AnnotationSession();
const api = new ApiClient();

let view: ViewTransform = { scale: 1, offsetX: 0, offsetY: 0 };
let imageEl: HTMLImageElement | null = null;
let gtBits: MaskBits | null = null;
let running = false;

function setStatus(text: string, isError = false): void {
  statusLine.textContent = text;
  statusLine.classList.toggle('error', isError);
}

function readAsDataUrl(file: File): Promise<string> {
  return new Promise((resolve, reject) => {
    const reader = new FileReader();
    reader.onload = () => resolve(reader.result as string);
    reader.onerror = () => reject(reader.error);
    reader.readAsDataURL(file);
  });
}

function decodeElement(dataUrl: string): Promise<HTMLImageElement> {
  return new Promise((resolve, reject) => {
    const el = new Image();
    el.onload = () => resolve(el);
    el.onerror = () => reject(new Error('file is not a readable image'));
    el.src = dataUrl;
  });
}

function rasterBits(el: HTMLImageElement): MaskBits {
  const off = document.createElement('canvas');
  off.width = el.naturalWidth;
  off.height = el.naturalHeight;
  const octx = off.getContext('2d')!;
  octx.drawImage(el, 0, 0);
  const data = octx.getImageData(0, 0, off.width, off.height).data;
  const bits = new Uint8Array(off.width * off.height);
  for (let i = 0; i < bits.length; i++) {
    bits[i] = data[i * 4] > 127 ? 1 : 0;
  }
  return { width: off.width, height: off.height, bits };
}

function loadedImageOf(el: HTMLImageElement, dataUrl: string): LoadedImage {
  return {
    data: dataUrl.slice(dataUrl.indexOf(',') + 1),
    width: el.naturalWidth,
    height: el.naturalHeight,
  };
}

function fitCanvas(): void {
  const box = canvas.parentElement!.getBoundingClientRect();
  canvas.width = Math.max(64, Math.floor(box.width));
  canvas.height = Math.max(64, Math.floor(box.height));
}

function redraw(): void {
  ctx.fillStyle = '#22262b';
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  if (!imageEl || !session.image) {
    return;
  }
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(imageEl, view.offsetX, view.offsetY,
                session.image.width * view.scale, session.image.height * view.scale);
  const plan = renderPlan({
    seeds: session.seeds,
    segmentationContour: session.lastResponse?.contour ?? null,
    gtMask: gtBits,
  });
  for (const op of plan) {
    if (op.kind === 'contour') {
      ctx.fillStyle = op.color;
      const side = Math.max(1, view.scale);
      for (const [x, y] of op.points) {
        const p = imageToScreen(view, { x, y });
        ctx.fillRect(p.x, p.y, side, side);
      }
    } else {
      const p = imageToScreen(view, { x: op.x + 0.5, y: op.y + 0.5 });
      const r = Math.max(3, view.scale * 0.45);
      ctx.beginPath();
      ctx.arc(p.x, p.y, r, 0, 2 * Math.PI);
      ctx.fillStyle = op.color;
      ctx.fill();
      ctx.lineWidth = 1.5;
      ctx.strokeStyle = 'white';
      ctx.stroke();
    }
  }
}

function refreshMetrics(): void {
  if (!session.showMetrics()) {
    metricsPanel.hidden = true;
    return;
  }
  const m = session.lastResponse!.metrics!;
  const set = (id: string, value: string) => { must<HTMLElement>(id).textContent = value; };
  set('m-dsc', m.dsc.toFixed(4));
  set('m-sen', m.sensitivity.toFixed(4));
  set('m-spe', m.specificity.toFixed(4));
  set('m-bac', m.bac.toFixed(4));
  metricsPanel.hidden = false;
}

function refreshControls(): void {
  bgButton.disabled = !session.allowsBackground();
  fgButton.classList.toggle('active', session.activeLabel === 'fg');
  bgButton.classList.toggle('active', session.activeLabel === 'bg' && session.allowsBackground());
  const blocker = session.segmentBlocker();
  runButton.disabled = running || blocker !== null;
  runButton.title = blocker ?? 'POST /segment';
  const noImage = session.image === null;
  mltButton.disabled = running || noImage;
  deButton.disabled = running || noImage;
  exportButton.disabled = session.seeds.length === 0;
  seedCount.textContent = String(session.seeds.length);
  const iters = session.lastResponse
    ? `${session.lastResponse.iterations} iterations, converged ${session.lastResponse.converged}`
    : '';
  must<HTMLElement>('iterations').textContent = iters;
}

function afterStateChange(): void {
  refreshControls();
  refreshMetrics();
  redraw();
}

async function onImagePicked(file: File): Promise<void> {
  try {
    const dataUrl = await readAsDataUrl(file);
    const el = await decodeElement(dataUrl);
    imageEl = el;
    gtBits = null;
    gtInput.value = '';
    session.loadImage(loadedImageOf(el, dataUrl));
    view = fitView(el.naturalWidth, el.naturalHeight, canvas.width, canvas.height);
    setStatus(`${file.name}: ${el.naturalWidth}x${el.naturalHeight}`);
  } catch (err) {
    setStatus(String(err instanceof Error ? err.message : err), true);
  }
  afterStateChange();
}

async function onGtPicked(file: File): Promise<void> {
  try {
    const dataUrl = await readAsDataUrl(file);
    const el = await decodeElement(dataUrl);
    session.loadGroundTruth(loadedImageOf(el, dataUrl));
    gtBits = rasterBits(el);
    setStatus(`reference mask loaded from ${file.name}`);
  } catch (err) {
    setStatus(String(err instanceof Error ? err.message : err), true);
  }
  afterStateChange();
}

function parsedParams(): Record<string, unknown> | null {
  const text = paramsBox.value.trim();
  if (text === '') {
    return {};
  }
  try {
    const value = JSON.parse(text);
    if (typeof value !== 'object' || value === null || Array.isArray(value)) {
      throw new Error('expected a JSON object');
    }
    return value as Record<string, unknown>;
  } catch (err) {
    setStatus(`bad params: ${err instanceof Error ? err.message : err}`, true);
    return null;
  }
}

async function runSegmentation(): Promise<void> {
  const blocker = session.segmentBlocker();
  if (blocker !== null) {
    setStatus(blocker, true);
    return;
  }
  const params = parsedParams();
  if (params === null) {
    return;
  }
  session.params = params;
  running = true;
  refreshControls();
  setStatus(`running ${session.method} ...`);
  try {
    const response = await api.segment(session.buildRequest());
    session.applyResponse(response);
    setStatus(`done in ${response.iterations} iterations`);
  } catch (err) {
    if (isAbortError(err)) {
      return; // superseded by a newer request
    }
    // seeds and the previous overlay stay untouched on failure
    const msg = err instanceof ApiError ? `service: ${err.message}` : String(err);
    setStatus(msg, true);
  } finally {
    running = false;
    afterStateChange();
  }
}

async function runAutoseed(strategy: 'mlt' | 'de'): Promise<void> {
  if (!session.image) {
    return;
  }
  running = true;
  refreshControls();
  setStatus(`seeding with ${strategy} ...`);
  try {
    const response = await api.autoseed({ image: session.image.data, strategy, params: {} });
    session.replaceSeeds(response.seeds);
    setStatus(`${strategy} placed ${response.seeds.length} seeds; edit freely, then run`);
  } catch (err) {
    if (isAbortError(err)) {
      return;
    }
    const msg = err instanceof ApiError ? `service: ${err.message}` : String(err);
    setStatus(msg, true);
  } finally {
    running = false;
    afterStateChange();
  }
}

function downloadSeeds(): void {
  const blob = new Blob([session.exportSeeds()], { type: 'application/json' });
  const url = URL.createObjectURL(blob);
  const a = document.createElement('a');
  a.href = url;
  a.download = 'seeds.json';
  a.click();
  URL.revokeObjectURL(url);
}

// pointer wiring: left click places a seed, middle or alt-drag pans
let panning: { startX: number; startY: number; view: ViewTransform } | null = null;

canvas.addEventListener('pointerdown', (e) => {
  const rect = canvas.getBoundingClientRect();
  const sx = e.clientX - rect.left;
  const sy = e.clientY - rect.top;
  if (e.button === 1 || e.altKey) {
    panning = { startX: sx, startY: sy, view };
    canvas.setPointerCapture(e.pointerId);
    e.preventDefault();
    return;
  }
  if (e.button !== 0) {
    return;
  }
  const p = screenToImage(view, { x: sx, y: sy });
  const ok = session.placeSeed(Math.floor(p.x), Math.floor(p.y));
  if (!ok && session.lastRejection) {
    setStatus(session.lastRejection, true);
  }
  afterStateChange();
});

canvas.addEventListener('pointermove', (e) => {
  if (!panning) {
    return;
  }
  const rect = canvas.getBoundingClientRect();
  const sx = e.clientX - rect.left;
  const sy = e.clientY - rect.top;
  view = panBy(panning.view, sx - panning.startX, sy - panning.startY);
  redraw();
});

canvas.addEventListener('pointerup', (e) => {
  if (panning) {
    canvas.releasePointerCapture(e.pointerId);
    panning = null;
  }
});

canvas.addEventListener('wheel', (e) => {
  if (!session.image) {
    return;
  }
  e.preventDefault();
  const rect = canvas.getBoundingClientRect();
  const cursor = { x: e.clientX - rect.left, y: e.clientY - rect.top };
  view = zoomAbout(view, cursor, e.deltaY < 0 ? 1.25 : 0.8);
  redraw();
}, { passive: false });

imageInput.addEventListener('change', () => {
  const file = imageInput.files?.[0];
  if (file) {
    void onImagePicked(file);
  }
});

gtInput.addEventListener('change', () => {
  const file = gtInput.files?.[0];
  if (file) {
    void onGtPicked(file);
  }
});

methodSelect.addEventListener('change', () => {
  session.setMethod(methodSelect.value as MethodName);
  afterStateChange();
});

const pickLabel = (label: SeedLabel) => {
  if (!session.setActiveLabel(label) && session.lastRejection) {
    setStatus(session.lastRejection, true);
  }
  refreshControls();
};

fgButton.addEventListener('click', () => pickLabel('fg'));
bgButton.addEventListener('click', () => pickLabel('bg'));
runButton.addEventListener('click', () => void runSegmentation());
mltButton.addEventListener('click', () => void runAutoseed('mlt'));
deButton.addEventListener('click', () => void runAutoseed('de'));
undoButton.addEventListener('click', () => { session.undo(); afterStateChange(); });
redoButton.addEventListener('click', () => { session.redo(); afterStateChange(); });
clearButton.addEventListener('click', () => { session.clearSeeds(); afterStateChange(); });
exportButton.addEventListener('click', downloadSeeds);

window.addEventListener('keydown', (e) => {
  if (!(e.ctrlKey || e.metaKey) || e.key.toLowerCase() !== 'z') {
    return;
  }
  e.preventDefault();
  if (e.shiftKey) {
    session.redo();
  } else {
    session.undo();
  }
  afterStateChange();
});

window.addEventListener('resize', () => {
  fitCanvas();
  redraw();
});

fitCanvas();
afterStateChange();
void api.health().then((up) => {
  if (!up) {
    setStatus('service unreachable; start it with: growseg serve --static frontend', true);
  }
});
