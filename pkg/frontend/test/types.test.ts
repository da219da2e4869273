import { describe, expect, it } from 'vitest'

import {
  MalformedPayloadError,
  MetadataLeakError,
  parsePrecisionCurve,
  parseProgress,
  parseTaskView,
  parseVoteReceipt,
} from '../src/types.js'

const progress = { done: 2, total: 9 }

const pendingPayload = {
  done: false,
  segment_id: 'clip_000@0',
  predicted_label: 'tone low',
  audio_url: '/api/segments/clip_000@0/audio',
  progress,
}

describe('parseTaskView', () => {
  it('parses a pending task', () => {
    const view = parseTaskView(pendingPayload)
    expect(view.kind).toBe('task')
    if (view.kind !== 'task') throw new Error('unreachable')
    expect(view.segmentId).toBe('clip_000@0')
    expect(view.predictedLabel).toBe('tone low')
    expect(view.audioUrl).toBe('/api/segments/clip_000@0/audio')
    expect(view.progress).toEqual({ done: 2, total: 9 })
  })

  it('parses a finished round', () => {
    const view = parseTaskView({ done: true, progress })
    expect(view).toEqual({ kind: 'done', progress: { done: 2, total: 9 } })
  })

  it('rejects any field beyond the blind-judging set', () => {
    for (const leak of ['source_url', 'clip_path', 'query', 'dataset', 'file_path']) {
      const payload = { ...pendingPayload, [leak]: 'oops' }
      expect(() => parseTaskView(payload)).toThrow(MetadataLeakError)
    }
  })

  it('rejects extra fields on the done view too', () => {
    expect(() => parseTaskView({ done: true, progress, stats: {} })).toThrow(
      MetadataLeakError,
    )
  })

  it('rejects a missing done flag', () => {
    const { done: _done, ...rest } = pendingPayload
    expect(() => parseTaskView(rest)).toThrow(MalformedPayloadError)
  })

  it('rejects wrongly typed fields', () => {
    expect(() => parseTaskView({ ...pendingPayload, segment_id: 7 })).toThrow(
      MalformedPayloadError,
    )
    expect(() => parseTaskView({ ...pendingPayload, predicted_label: '' })).toThrow(
      MalformedPayloadError,
    )
    expect(() => parseTaskView({ ...pendingPayload, progress: { done: 2 } })).toThrow(
      MalformedPayloadError,
    )
  })

  it('rejects non-object payloads', () => {
    for (const bad of [null, 'task', 7, [pendingPayload]]) {
      expect(() => parseTaskView(bad)).toThrow(MalformedPayloadError)
    }
  })

  it('MetadataLeakError is a MalformedPayloadError', () => {
    expect(new MetadataLeakError('x')).toBeInstanceOf(MalformedPayloadError)
  })
})

describe('parseProgress', () => {
  it('parses a well-formed counter', () => {
    expect(parseProgress(progress)).toEqual({ done: 2, total: 9 })
  })

  it('rejects extra or non-numeric fields', () => {
    expect(() => parseProgress({ ...progress, eta: 1 })).toThrow(MetadataLeakError)
    expect(() => parseProgress({ done: '2', total: 9 })).toThrow(MalformedPayloadError)
    expect(() => parseProgress({ done: NaN, total: 9 })).toThrow(MalformedPayloadError)
  })
})

describe('parseVoteReceipt', () => {
  it('parses a recorded vote', () => {
    const receipt = parseVoteReceipt({
      recorded: true,
      segment_id: 'clip_000@0',
      progress,
    })
    expect(receipt.recorded).toBe(true)
    expect(receipt.segmentId).toBe('clip_000@0')
    expect(receipt.progress.total).toBe(9)
  })

  it('rejects a receipt that is not positively recorded', () => {
    expect(() =>
      parseVoteReceipt({ recorded: false, segment_id: 'x', progress }),
    ).toThrow(MalformedPayloadError)
    expect(() => parseVoteReceipt({ segment_id: 'x', progress })).toThrow(
      MalformedPayloadError,
    )
  })
})

describe('parsePrecisionCurve', () => {
  it('parses a curve with its points', () => {
    const curve = parsePrecisionCurve({
      gt_mode: 'human',
      classifier: 'all',
      points: [
        { k: 1, precision: 1.0 },
        { k: 5, precision: 0.5 },
      ],
    })
    expect(curve.gtMode).toBe('human')
    expect(curve.classifier).toBe('all')
    expect(curve.points).toEqual([
      { k: 1, precision: 1.0 },
      { k: 5, precision: 0.5 },
    ])
  })

  it('rejects malformed curves', () => {
    expect(() =>
      parsePrecisionCurve({ gt_mode: 'human', classifier: 'all', points: 'none' }),
    ).toThrow(MalformedPayloadError)
    expect(() =>
      parsePrecisionCurve({
        gt_mode: 'human',
        classifier: 'all',
        points: [{ k: 1 }],
      }),
    ).toThrow(MalformedPayloadError)
    expect(() =>
      parsePrecisionCurve({ classifier: 'all', points: [] }),
    ).toThrow(MalformedPayloadError)
  })
})
