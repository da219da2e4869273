/** DOM wiring: renders an EvaluatorSession and forwards clicks and keys. */

import type { EvaluatorSession, SessionState } from './app.js'

export interface MountedApp {
  render(state: Readonly<SessionState>): void
  dispose(): void
}

export function mountApp(root: HTMLElement, session: EvaluatorSession): MountedApp {
  root.innerHTML = `
    <section class="card">
      <p id="status" role="status"></p>
      <p id="label" class="label"></p>
      <p id="progress" class="progress"></p>
      <div class="controls">
        <button id="play" type="button">Play segment</button>
        <button id="vote-correct" type="button">Correct (c)</button>
        <button id="vote-incorrect" type="button">Incorrect (i)</button>
        <button id="retry" type="button" hidden>Retry</button>
      </div>
      <p id="notice" class="notice" hidden></p>
      <p id="error" class="error" hidden></p>
    </section>
  `
  const el = {
    status: root.querySelector('#status') as HTMLElement,
    label: root.querySelector('#label') as HTMLElement,
    progress: root.querySelector('#progress') as HTMLElement,
    play: root.querySelector('#play') as HTMLButtonElement,
    correct: root.querySelector('#vote-correct') as HTMLButtonElement,
    incorrect: root.querySelector('#vote-incorrect') as HTMLButtonElement,
    retry: root.querySelector('#retry') as HTMLButtonElement,
    notice: root.querySelector('#notice') as HTMLElement,
    error: root.querySelector('#error') as HTMLElement,
  }

  el.play.addEventListener('click', () => void session.playAudio())
  el.correct.addEventListener('click', () => void session.vote('correct'))
  el.incorrect.addEventListener('click', () => void session.vote('incorrect'))
  el.retry.addEventListener('click', () => void session.retry())

  const onKey = (event: KeyboardEvent) => {
    if (event.key === 'c') void session.vote('correct')
    if (event.key === 'i') void session.vote('incorrect')
    if (event.key === 'p' || event.key === ' ') void session.playAudio()
  }
  root.ownerDocument.addEventListener('keydown', onKey)

  function render(state: Readonly<SessionState>): void {
    const { phase, task, progress } = state
    el.status.textContent = statusLine(state)
    el.label.textContent = task ? `Asserted label: ${task.predictedLabel}` : ''
    el.progress.textContent = progress ? `${progress.done} of ${progress.total} voted` : ''

    const canPlay = phase === 'ready' || phase === 'awaiting-vote'
    const canVote = phase === 'awaiting-vote' && state.playedOnce
    el.play.disabled = !canPlay
    el.correct.disabled = !canVote
    el.incorrect.disabled = !canVote
    el.retry.hidden = phase !== 'error'

    el.notice.hidden = state.notice === null
    el.notice.textContent = state.notice ?? ''
    el.error.hidden = state.error === null
    el.error.textContent = state.error ?? ''
  }

  return {
    render,
    dispose: () => root.ownerDocument.removeEventListener('keydown', onKey),
  }
}

function statusLine(state: Readonly<SessionState>): string {
  switch (state.phase) {
    case 'idle':
    case 'loading':
      return 'Loading next segment...'
    case 'ready':
      return 'Listen to the segment, then judge the asserted label.'
    case 'playing':
      return 'Playing...'
    case 'awaiting-vote':
      return 'Does the segment contain the asserted sound?'
    case 'submitting':
      return 'Recording your vote...'
    case 'done':
      return 'All assigned segments are voted. Thank you!'
    case 'error':
      return 'Something went wrong.'
  }
}
