/** Entry point: query parameters pick the server and evaluator name. */

import { FeedbackApi } from './api.js'
import { EvaluatorSession } from './app.js'
import { HtmlAudioPlayer } from './player.js'
import { mountApp } from './ui.js'

function bootstrap(): void {
  const params = new URLSearchParams(window.location.search)
  const evaluator = params.get('evaluator')
  const server = params.get('server') ?? 'http://127.0.0.1:8000'
  const root = document.getElementById('app')
  if (root === null) throw new Error('missing #app element')

  if (evaluator === null || evaluator === '') {
    root.innerHTML = `
      <form class="card" id="who">
        <label>Evaluator name
          <input name="evaluator" required autofocus>
        </label>
        <button type="submit">Start</button>
      </form>
    `
    const form = root.querySelector('#who') as HTMLFormElement
    form.addEventListener('submit', (event) => {
      event.preventDefault()
      const name = new FormData(form).get('evaluator')
      const next = new URL(window.location.href)
      next.searchParams.set('evaluator', String(name))
      window.location.assign(next.toString())
    })
    return
  }

  const api = new FeedbackApi(server)
  let mounted: ReturnType<typeof mountApp> | null = null
  const session = new EvaluatorSession(api, evaluator, new HtmlAudioPlayer(), (state) =>
    mounted?.render(state),
  )
  mounted = mountApp(root, session)
  mounted.render(session.getState())
  void session.start()
}

bootstrap()
