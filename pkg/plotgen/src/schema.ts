import { z } from 'zod';

export const SeriesSpec = z.object({
  csv: z.string(),
  label: z.string(),
  kind: z.enum(['theory', 'sim']),
  column: z.string(),
  xColumn: z.string().default('EbN0_dB'),
  // sim series may carry a confidence-interval column for whiskers
  ciColumn: z.string().optional(),
  color: z.string().optional(),
});

export const GapAnnotation = z.object({
  a: z.string(),
  b: z.string(),
  atBer: z.number().positive(),
});

export const PlotSpec = z.object({
  title: z.string().default(''),
  output: z.string(),
  x: z
    .object({
      label: z.string().default('Eb/N0 (dB)'),
      min: z.number().optional(),
      max: z.number().optional(),
    })
    .default({}),
  y: z
    .object({
      label: z.string().default('BER'),
      min: z.number().positive().optional(),
      max: z.number().positive().optional(),
    })
    .default({}),
  series: z.array(SeriesSpec).min(1),
  gapAnnotations: z.array(GapAnnotation).default([]),
});

export type SeriesSpecT = z.infer<typeof SeriesSpec>;
export type GapAnnotationT = z.infer<typeof GapAnnotation>;
export type PlotSpecT = z.infer<typeof PlotSpec>;
