/**
 * Wire types for the feedback service, parsed defensively.
 *
 * Task payloads are validated against a strict key allowlist: evaluators
 * must judge by listening, so any extra field (clip origin, query text,
 * file path, ...) is treated as a contract violation, not ignored.
 */

export interface ProgressInfo {
  done: number
  total: number
}

export interface PendingTask {
  kind: 'task'
  segmentId: string
  predictedLabel: string
  audioUrl: string
  progress: ProgressInfo
}

export interface RoundDone {
  kind: 'done'
  progress: ProgressInfo
}

export type TaskView = PendingTask | RoundDone

export interface VoteReceipt {
  recorded: boolean
  segmentId: string
  progress: ProgressInfo
}

export interface PrecisionPoint {
  k: number
  precision: number
}

export interface PrecisionCurve {
  gtMode: string
  classifier: string
  points: PrecisionPoint[]
}

export class MalformedPayloadError extends Error {}

/** Raised when a task payload carries fields beyond the blind-judging set. */
export class MetadataLeakError extends MalformedPayloadError {}

const TASK_KEYS = ['done', 'segment_id', 'predicted_label', 'audio_url', 'progress']
const DONE_KEYS = ['done', 'progress']
const PROGRESS_KEYS = ['done', 'total']

function asRecord(payload: unknown, what: string): Record<string, unknown> {
  if (typeof payload !== 'object' || payload === null || Array.isArray(payload)) {
    throw new MalformedPayloadError(`${what}: expected an object`)
  }
  return payload as Record<string, unknown>
}

function rejectExtraKeys(obj: Record<string, unknown>, allowed: string[], what: string): void {
  const extras = Object.keys(obj).filter((key) => !allowed.includes(key))
  if (extras.length > 0) {
    throw new MetadataLeakError(`${what}: unexpected fields ${extras.join(', ')}`)
  }
}

function requireString(obj: Record<string, unknown>, key: string, what: string): string {
  const value = obj[key]
  if (typeof value !== 'string' || value.length === 0) {
    throw new MalformedPayloadError(`${what}: missing string field ${key}`)
  }
  return value
}

function requireNumber(obj: Record<string, unknown>, key: string, what: string): number {
  const value = obj[key]
  if (typeof value !== 'number' || !Number.isFinite(value)) {
    throw new MalformedPayloadError(`${what}: missing numeric field ${key}`)
  }
  return value
}

export function parseProgress(payload: unknown): ProgressInfo {
  const obj = asRecord(payload, 'progress')
  rejectExtraKeys(obj, PROGRESS_KEYS, 'progress')
  return {
    done: requireNumber(obj, 'done', 'progress'),
    total: requireNumber(obj, 'total', 'progress'),
  }
}

export function parseTaskView(payload: unknown): TaskView {
  const obj = asRecord(payload, 'task')
  if (typeof obj.done !== 'boolean') {
    throw new MalformedPayloadError('task: missing boolean field done')
  }
  if (obj.done) {
    rejectExtraKeys(obj, DONE_KEYS, 'task')
    return { kind: 'done', progress: parseProgress(obj.progress) }
  }
  rejectExtraKeys(obj, TASK_KEYS, 'task')
  return {
    kind: 'task',
    segmentId: requireString(obj, 'segment_id', 'task'),
    predictedLabel: requireString(obj, 'predicted_label', 'task'),
    audioUrl: requireString(obj, 'audio_url', 'task'),
    progress: parseProgress(obj.progress),
  }
}

export function parseVoteReceipt(payload: unknown): VoteReceipt {
  const obj = asRecord(payload, 'vote receipt')
  if (obj.recorded !== true) {
    throw new MalformedPayloadError('vote receipt: recorded flag missing')
  }
  return {
    recorded: true,
    segmentId: requireString(obj, 'segment_id', 'vote receipt'),
    progress: parseProgress(obj.progress),
  }
}

export function parsePrecisionCurve(payload: unknown): PrecisionCurve {
  const obj = asRecord(payload, 'precision')
  const rawPoints = obj.points
  if (!Array.isArray(rawPoints)) {
    throw new MalformedPayloadError('precision: points must be an array')
  }
  const points = rawPoints.map((entry) => {
    const point = asRecord(entry, 'precision point')
    return {
      k: requireNumber(point, 'k', 'precision point'),
      precision: requireNumber(point, 'precision', 'precision point'),
    }
  })
  return {
    gtMode: requireString(obj, 'gt_mode', 'precision'),
    classifier: requireString(obj, 'classifier', 'precision'),
    points,
  }
}
