import type {
  MethodName,
  Seed,
  SeedLabel,
  SegmentRequest,
  SegmentResponse,
} from './types.js';

export interface LoadedImage {
  data: string; // base64 PNG without the data: prefix
  width: number;
  height: number;
}

const copySeeds = (seeds: Seed[]): Seed[] => seeds.map((s) => ({ ...s }));

/**
 * All annotation state for one image: the seed list with labels, the chosen
 * method, and the last service response. Every seed edit is undoable, and
 * the session never mutates a caller-held seed array.
 */
export class AnnotationSession {
  image: LoadedImage | null = null;
  gt: LoadedImage | null = null;
  method: MethodName = 'growcut';
  params: Record<string, unknown> = {};
  activeLabel: SeedLabel = 'fg';
  lastResponse: SegmentResponse | null = null;
  lastRejection: string | null = null;

  private seedList: Seed[] = [];
  private undoStack: Seed[][] = [];
  private redoStack: Seed[][] = [];

  get seeds(): Seed[] {
    return copySeeds(this.seedList);
  }

  loadImage(image: LoadedImage): void {
    this.image = image;
    this.gt = null;
    this.seedList = [];
    this.undoStack = [];
    this.redoStack = [];
    this.lastResponse = null;
    this.lastRejection = null;
  }

  loadGroundTruth(gt: LoadedImage): void {
    if (!this.image) {
      throw new Error('load an image before its reference mask');
    }
    if (gt.width !== this.image.width || gt.height !== this.image.height) {
      throw new Error('reference mask size does not match the image');
    }
    this.gt = gt;
  }

  /** The fuzzy engine grows from foreground seeds only. */
  allowsBackground(): boolean {
    return this.method !== 'fuzzy';
  }

  setMethod(method: MethodName): void {
    this.method = method;
    if (!this.allowsBackground() && this.activeLabel === 'bg') {
      this.activeLabel = 'fg';
    }
  }

  setActiveLabel(label: SeedLabel): boolean {
    if (label === 'bg' && !this.allowsBackground()) {
      this.lastRejection = 'fuzzy takes foreground seeds only';
      return false;
    }
    this.activeLabel = label;
    return true;
  }

  placeSeed(x: number, y: number, label?: SeedLabel): boolean {
    const lab = label ?? this.activeLabel;
    if (!this.image) {
      this.lastRejection = 'no image loaded';
      return false;
    }
    if (lab === 'bg' && !this.allowsBackground()) {
      this.lastRejection = 'fuzzy takes foreground seeds only';
      return false;
    }
    if (!Number.isInteger(x) || !Number.isInteger(y)
        || x < 0 || x >= this.image.width || y < 0 || y >= this.image.height) {
      this.lastRejection = `(${x}, ${y}) is outside the image`;
      return false;
    }
    this.record();
    this.seedList.push({ x, y, label: lab });
    return true;
  }

  /** Replace the whole seed list (autoseed results land here); undoable. */
  replaceSeeds(seeds: Seed[]): void {
    this.record();
    this.seedList = copySeeds(seeds);
  }

  clearSeeds(): void {
    if (this.seedList.length === 0) {
      return;
    }
    this.record();
    this.seedList = [];
  }

  undo(): boolean {
    const prev = this.undoStack.pop();
    if (prev === undefined) {
      return false;
    }
    this.redoStack.push(this.seedList);
    this.seedList = prev;
    return true;
  }

  redo(): boolean {
    const next = this.redoStack.pop();
    if (next === undefined) {
      return false;
    }
    this.undoStack.push(this.seedList);
    this.seedList = next;
    return true;
  }

  /** Reason the segment button is disabled, or null when ready to run. */
  segmentBlocker(): string | null {
    if (!this.image) {
      return 'load an image first';
    }
    if (this.method !== 'ssgc' && !this.seedList.some((s) => s.label === 'fg')) {
      return 'place at least one foreground seed';
    }
    return null;
  }

  /** The request carries exactly the seed list on screen, nothing else. */
  buildRequest(): SegmentRequest {
    if (!this.image) {
      throw new Error('no image loaded');
    }
    const req: SegmentRequest = {
      image: this.image.data,
      seeds: this.seeds,
      method: this.method,
      params: { ...this.params },
    };
    if (this.gt) {
      req.gt = this.gt.data;
    }
    return req;
  }

  applyResponse(response: SegmentResponse): void {
    this.lastResponse = response;
  }

  /** Metrics make sense only when a reference mask is loaded. */
  showMetrics(): boolean {
    return this.gt !== null && this.lastResponse?.metrics !== undefined;
  }

  /** Same byte format the command-line tools read and write. */
  exportSeeds(): string {
    const rows = this.seedList.map((s) => ({ x: s.x, y: s.y, label: s.label }));
    return JSON.stringify(rows, null, 2) + '\n';
  }

  private record(): void {
    this.undoStack.push(copySeeds(this.seedList));
    this.redoStack = [];
    this.lastRejection = null;
  }
}
