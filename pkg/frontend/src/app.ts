/**
 * One evaluator's pass through their task queue.
 *
 * The machine enforces the round's UI rules: a verdict can only be cast
 * after the segment has been heard in full at least once, a submission in
 * flight blocks further submissions, and a duplicate rejected by the server
 * surfaces as a notice rather than an error before moving on.
 */

import { ApiError, DuplicateVoteError, type FeedbackApi, type Verdict } from './api.js'
import type { SegmentPlayer } from './player.js'
import type { PendingTask, ProgressInfo } from './types.js'

export type SessionPhase =
  | 'idle'
  | 'loading'
  | 'ready'
  | 'playing'
  | 'awaiting-vote'
  | 'submitting'
  | 'done'
  | 'error'

export interface SessionState {
  phase: SessionPhase
  task: PendingTask | null
  progress: ProgressInfo | null
  playedOnce: boolean
  notice: string | null
  error: string | null
}

export type StateListener = (state: Readonly<SessionState>) => void

export class EvaluatorSession {
  private state: SessionState = {
    phase: 'idle',
    task: null,
    progress: null,
    playedOnce: false,
    notice: null,
    error: null,
  }

  constructor(
    private readonly api: FeedbackApi,
    readonly evaluator: string,
    private readonly player: SegmentPlayer,
    private readonly onChange: StateListener = () => {},
  ) {}

  getState(): Readonly<SessionState> {
    return this.state
  }

  private update(patch: Partial<SessionState>): void {
    this.state = { ...this.state, ...patch }
    this.onChange(this.state)
  }

  /** Fetch the first (or next) task; keeps any notice for one render. */
  async start(): Promise<void> {
    this.update({ phase: 'loading', task: null, playedOnce: false, error: null })
    let view
    try {
      view = await this.api.nextTask(this.evaluator)
    } catch (err) {
      this.update({ phase: 'error', error: describe(err) })
      return
    }
    if (view.kind === 'done') {
      this.update({ phase: 'done', task: null, progress: view.progress })
      return
    }
    this.update({ phase: 'ready', task: view, progress: view.progress })
  }

  async playAudio(): Promise<void> {
    const { phase, task } = this.state
    if (task === null || (phase !== 'ready' && phase !== 'awaiting-vote')) return
    this.update({ phase: 'playing', notice: null })
    try {
      await this.player.play(this.api.audioUrl(task))
    } catch (err) {
      // Playback trouble should not strand the task: allow a retry.
      this.update({
        phase: this.state.playedOnce ? 'awaiting-vote' : 'ready',
        notice: describe(err),
      })
      return
    }
    this.update({ phase: 'awaiting-vote', playedOnce: true })
  }

  /**
   * Cast a verdict. Ignored unless a fully played task is waiting and no
   * submission is already in flight, so double clicks cannot double-vote.
   */
  async vote(verdict: Verdict): Promise<void> {
    const { phase, task, playedOnce } = this.state
    if (phase !== 'awaiting-vote' || task === null || !playedOnce) return
    this.update({ phase: 'submitting', notice: null })
    try {
      const receipt = await this.api.submitVote(task.segmentId, this.evaluator, verdict)
      this.update({ progress: receipt.progress })
    } catch (err) {
      if (err instanceof DuplicateVoteError) {
        this.update({ notice: 'Your vote on this segment was already recorded.' })
      } else {
        this.update({ phase: 'error', error: describe(err) })
        return
      }
    }
    this.player.stop()
    await this.start()
  }

  /** Leave the error state, back to where the queue left off. */
  async retry(): Promise<void> {
    if (this.state.phase !== 'error') return
    await this.start()
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError && err.status > 0) {
    return `${err.message} (status ${err.status})`
  }
  return err instanceof Error ? err.message : String(err)
}
