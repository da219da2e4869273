import { describe, expect, it } from 'vitest'

import {
  ApiError,
  DuplicateVoteError,
  FeedbackApi,
  UnknownAssignmentError,
} from '../src/api.js'
import type { PendingTask } from '../src/types.js'

/** Minimal stand-in for a fetch Response; only what FeedbackApi touches. */
function res(status: number, body: unknown): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => body,
    arrayBuffer: async () => new TextEncoder().encode('RIFF').buffer,
  } as unknown as Response
}

interface Call {
  url: string
  init?: RequestInit
}

function recordingFetch(responses: Response[]): { calls: Call[]; fetchFn: typeof fetch } {
  const calls: Call[] = []
  const fetchFn = (async (url: string, init?: RequestInit) => {
    calls.push({ url, init })
    const next = responses.shift()
    if (next === undefined) throw new Error('unexpected extra request')
    return next
  }) as unknown as typeof fetch
  return { calls, fetchFn }
}

const progress = { done: 0, total: 3 }

const taskPayload = {
  done: false,
  segment_id: 's0@0',
  predicted_label: 'tone mid',
  audio_url: '/api/segments/s0@0/audio',
  progress,
}

const sampleTask: PendingTask = {
  kind: 'task',
  segmentId: 's0@0',
  predictedLabel: 'tone mid',
  audioUrl: '/api/segments/s0@0/audio',
  progress,
}

describe('FeedbackApi.nextTask', () => {
  it('requests the evaluator queue and parses the task', async () => {
    const { calls, fetchFn } = recordingFetch([res(200, taskPayload)])
    const api = new FeedbackApi('http://host:1', fetchFn)
    const view = await api.nextTask('ada lovelace')
    expect(calls[0]?.url).toBe('http://host:1/api/assignments?evaluator=ada%20lovelace')
    expect(view.kind).toBe('task')
  })

  it('maps error statuses to ApiError with the server message', async () => {
    const { fetchFn } = recordingFetch([res(404, { error: "unknown evaluator 'x'" })])
    const api = new FeedbackApi('http://host:1', fetchFn)
    const err = await api.nextTask('x').catch((e: unknown) => e)
    expect(err).toBeInstanceOf(ApiError)
    expect((err as ApiError).status).toBe(404)
    expect((err as ApiError).message).toContain('unknown evaluator')
  })

  it('wraps network failures as status 0', async () => {
    const failing = (async () => {
      throw new TypeError('connection refused')
    }) as unknown as typeof fetch
    const api = new FeedbackApi('http://host:1', failing)
    const err = await api.nextTask('a').catch((e: unknown) => e)
    expect(err).toBeInstanceOf(ApiError)
    expect((err as ApiError).status).toBe(0)
    expect((err as ApiError).message).toContain('cannot reach')
  })
})

describe('FeedbackApi.submitVote', () => {
  it('posts the vote body and parses the receipt', async () => {
    const receipt = { recorded: true, segment_id: 's0@0', progress }
    const { calls, fetchFn } = recordingFetch([res(201, receipt)])
    const api = new FeedbackApi('http://host:1', fetchFn)
    const out = await api.submitVote('s0@0', 'ada', 'correct')
    expect(out.segmentId).toBe('s0@0')
    const call = calls[0]
    expect(call?.url).toBe('http://host:1/api/votes')
    expect(call?.init?.method).toBe('POST')
    expect(JSON.parse(String(call?.init?.body))).toEqual({
      segment_id: 's0@0',
      evaluator_id: 'ada',
      verdict: 'correct',
    })
  })

  it('maps 409 to DuplicateVoteError', async () => {
    const { fetchFn } = recordingFetch([res(409, { error: 'already voted' })])
    const api = new FeedbackApi('http://host:1', fetchFn)
    const err = await api.submitVote('s0@0', 'ada', 'correct').catch((e: unknown) => e)
    expect(err).toBeInstanceOf(DuplicateVoteError)
    expect((err as DuplicateVoteError).status).toBe(409)
  })

  it('maps 404 to UnknownAssignmentError', async () => {
    const { fetchFn } = recordingFetch([res(404, { error: 'not assigned' })])
    const api = new FeedbackApi('http://host:1', fetchFn)
    const err = await api.submitVote('s9@0', 'ada', 'correct').catch((e: unknown) => e)
    expect(err).toBeInstanceOf(UnknownAssignmentError)
  })

  it('maps other failures to plain ApiError', async () => {
    const { fetchFn } = recordingFetch([res(400, { error: 'verdict must be correct|incorrect' })])
    const api = new FeedbackApi('http://host:1', fetchFn)
    const err = await api.submitVote('s0@0', 'ada', 'correct').catch((e: unknown) => e)
    expect(err).toBeInstanceOf(ApiError)
    expect(err).not.toBeInstanceOf(DuplicateVoteError)
    expect((err as ApiError).status).toBe(400)
  })
})

describe('FeedbackApi.precision', () => {
  it('builds the query string from the options', async () => {
    const body = { gt_mode: 'human', classifier: 'synth', points: [{ k: 1, precision: 1 }] }
    const { calls, fetchFn } = recordingFetch([res(200, body)])
    const api = new FeedbackApi('http://host:1', fetchFn)
    const curve = await api.precision('human', { classifier: 'synth', kmax: 10 })
    expect(calls[0]?.url).toBe(
      'http://host:1/api/results/precision?gt=human&classifier=synth&kmax=10',
    )
    expect(curve.points).toHaveLength(1)
  })

  it('omits unset options', async () => {
    const body = { gt_mode: 'query', classifier: 'all', points: [] }
    const { calls, fetchFn } = recordingFetch([res(200, body)])
    const api = new FeedbackApi('http://host:1', fetchFn)
    await api.precision('query')
    expect(calls[0]?.url).toBe('http://host:1/api/results/precision?gt=query')
  })
})

describe('FeedbackApi url handling', () => {
  it('strips a trailing slash from the base url', () => {
    const api = new FeedbackApi('http://host:1/')
    expect(api.audioUrl(sampleTask)).toBe('http://host:1/api/segments/s0@0/audio')
  })

  it('fetches audio bytes from the task url', async () => {
    const { calls, fetchFn } = recordingFetch([res(200, null)])
    const api = new FeedbackApi('http://host:1', fetchFn)
    const bytes = await api.fetchAudio(sampleTask)
    expect(calls[0]?.url).toBe('http://host:1/api/segments/s0@0/audio')
    expect(new TextDecoder().decode(bytes.slice(0, 4))).toBe('RIFF')
  })
})
