export type SeedLabel = 'fg' | 'bg';

export interface Seed {
  x: number;
  y: number;
  label: SeedLabel;
}

export type MethodName = 'growcut' | 'fuzzy' | 'ssgc' | 'regiongrow';

export const METHODS: MethodName[] = ['growcut', 'fuzzy', 'ssgc', 'regiongrow'];

export interface SegmentRequest {
  image: string;
  seeds: Seed[];
  method: MethodName;
  params: Record<string, unknown>;
  gt?: string;
}

export interface OverlapMetrics {
  dsc: number;
  sensitivity: number;
  specificity: number;
  bac: number;
  shape_errors: Record<string, number>;
  spectrum_p: number;
}

export interface SegmentResponse {
  mask: string;
  contour: [number, number][];
  iterations: number;
  converged: boolean;
  metrics?: OverlapMetrics;
}

export interface AutoseedRequest {
  image: string;
  strategy: 'mlt' | 'de';
  params: Record<string, unknown>;
}

export interface AutoseedResponse {
  seeds: Seed[];
}

// Row-major mask raster; nonzero bytes are inside the mask.
export interface MaskBits {
  width: number;
  height: number;
  bits: Uint8Array;
}
