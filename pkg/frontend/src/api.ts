/** Typed fetch client for the feedback service HTTP API. */

import {
  parsePrecisionCurve,
  parseTaskView,
  parseVoteReceipt,
  type PendingTask,
  type PrecisionCurve,
  type TaskView,
  type VoteReceipt,
} from './types.js'

export type Verdict = 'correct' | 'incorrect'

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message)
  }
}

/** 409: this evaluator already voted on that segment. */
export class DuplicateVoteError extends ApiError {}

/** 404 on vote submission: the pairing is not part of this round. */
export class UnknownAssignmentError extends ApiError {}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>

async function errorMessage(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { error?: unknown }
    if (typeof body.error === 'string') return body.error
  } catch {
    // fall through to the generic message
  }
  return `request failed with status ${response.status}`
}

export class FeedbackApi {
  private readonly fetchFn: FetchLike

  constructor(
    readonly baseUrl: string,
    fetchFn?: FetchLike,
  ) {
    const f = fetchFn ?? fetch
    this.fetchFn = f.bind(globalThis) as FetchLike
  }

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, '') + path
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let response: Response
    try {
      response = await this.fetchFn(this.url(path), init)
    } catch (cause) {
      throw new ApiError(0, `cannot reach ${this.baseUrl}: ${String(cause)}`)
    }
    return response
  }

  async nextTask(evaluator: string): Promise<TaskView> {
    const response = await this.request(
      `/api/assignments?evaluator=${encodeURIComponent(evaluator)}`,
    )
    if (!response.ok) {
      throw new ApiError(response.status, await errorMessage(response))
    }
    return parseTaskView(await response.json())
  }

  async submitVote(segmentId: string, evaluator: string, verdict: Verdict): Promise<VoteReceipt> {
    const response = await this.request('/api/votes', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({
        segment_id: segmentId,
        evaluator_id: evaluator,
        verdict,
      }),
    })
    if (response.status === 409) {
      throw new DuplicateVoteError(409, await errorMessage(response))
    }
    if (response.status === 404) {
      throw new UnknownAssignmentError(404, await errorMessage(response))
    }
    if (!response.ok) {
      throw new ApiError(response.status, await errorMessage(response))
    }
    return parseVoteReceipt(await response.json())
  }

  async precision(
    gt: 'query' | 'human',
    opts: { classifier?: string; kmax?: number } = {},
  ): Promise<PrecisionCurve> {
    const params = new URLSearchParams({ gt })
    if (opts.classifier !== undefined) params.set('classifier', opts.classifier)
    if (opts.kmax !== undefined) params.set('kmax', String(opts.kmax))
    const response = await this.request(`/api/results/precision?${params.toString()}`)
    if (!response.ok) {
      throw new ApiError(response.status, await errorMessage(response))
    }
    return parsePrecisionCurve(await response.json())
  }

  async fetchAudio(task: PendingTask): Promise<ArrayBuffer> {
    const response = await this.request(task.audioUrl)
    if (!response.ok) {
      throw new ApiError(response.status, await errorMessage(response))
    }
    return response.arrayBuffer()
  }

  audioUrl(task: PendingTask): string {
    return this.url(task.audioUrl)
  }
}
