/** Segment audio playback behind a small interface the session can fake. */

export interface SegmentPlayer {
  /** Resolves when playback of the given URL has finished. */
  play(url: string): Promise<void>
  stop(): void
}

type AudioFactory = (url: string) => HTMLAudioElement

export class HtmlAudioPlayer implements SegmentPlayer {
  private current: HTMLAudioElement | null = null

  constructor(private readonly createAudio: AudioFactory = (url) => new Audio(url)) {}

  play(url: string): Promise<void> {
    this.stop()
    const element = this.createAudio(url)
    this.current = element
    return new Promise<void>((resolve, reject) => {
      element.addEventListener('ended', () => resolve(), { once: true })
      element.addEventListener(
        'error',
        () => reject(new Error(`cannot play ${url}`)),
        { once: true },
      )
      const started = element.play()
      // Older implementations return undefined instead of a promise.
      if (started !== undefined) started.catch(reject)
    })
  }

  stop(): void {
    if (this.current !== null) {
      this.current.pause()
      this.current = null
    }
  }
}
