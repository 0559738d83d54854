import { ApiError, createSession, getFeeds, postClick, putConstraints } from "./api";
import { renderChart } from "./chart";
import { trailingDebounce, type Debounced } from "./debounce";
import { renderFeedColumn } from "./feeds";
import { ConstraintSlider } from "./slider";
import type { Constraints, Feeds, FeedName, HistoryPoint, Slot } from "./types";

export const CONSTRAINT_DEBOUNCE_MS = 300;

interface ViewState {
  sessionId: string;
  iteration: number;
  feeds: Feeds;
  constraints: Constraints; // last server-confirmed values
  history: HistoryPoint[];
  filter: string;
  banner: string | null;
}

export type ArticleOpener = (url: string) => void;

/** The single-page app.
 *
 * All feed content, counts, and history come from the latest API
 * responses; the client holds no learner logic of its own. At most one
 * mutation request (click or constraint change) is in flight at a time.
 * A constraint change requested while another mutation is pending is
 * queued and sent when the line is free, so rapid slider movement never
 * stacks requests.
 */
export class App {
  private state: ViewState | null = null;
  private pending = false;
  private queuedConstraints: { lower: number; upper: number } | null = null;
  private slider: ConstraintSlider | null = null;
  private readonly scheduleConstraintPush: Debounced<[number, number]>;

  private readonly main: HTMLElement;
  private readonly banner: HTMLElement;
  private readonly bannerText: HTMLElement;
  private readonly iterationBadge: HTMLElement;
  private readonly unfilteredColumn: HTMLElement;
  private readonly balancedColumn: HTMLElement;
  private readonly sliderRoot: HTMLElement;
  private readonly chartSvg: SVGSVGElement;

  constructor(
    root: HTMLElement,
    private readonly openArticle: ArticleOpener = (url) =>
      window.open(url, "_blank", "noopener"),
  ) {
    root.innerHTML = `
      <header class="app-header">
        <h1>Balanced news</h1>
        <div class="toolbar">
          <input type="search" class="filter-input" placeholder="filter headlines">
          <span class="filter-note">display filter only; clicks keep teaching both feeds</span>
          <span class="iteration-badge"></span>
        </div>
      </header>
      <div class="banner" hidden>
        <span class="banner-text"></span>
        <button type="button" class="banner-dismiss">dismiss</button>
      </div>
      <main class="columns">
        <section class="feed-column" data-column="unfiltered"></section>
        <section class="feed-column" data-column="balanced"></section>
        <aside class="side-panel">
          <div class="slider-root"></div>
          <svg class="dashboard" role="img" aria-label="liberal share over time"></svg>
          <p class="chart-legend">unfiltered gold &middot; balanced orange &middot; bounds black</p>
        </aside>
      </main>
    `;

    this.main = root.querySelector("main") as HTMLElement;
    this.banner = root.querySelector(".banner") as HTMLElement;
    this.bannerText = root.querySelector(".banner-text") as HTMLElement;
    this.iterationBadge = root.querySelector(".iteration-badge") as HTMLElement;
    this.unfilteredColumn = root.querySelector('[data-column="unfiltered"]') as HTMLElement;
    this.balancedColumn = root.querySelector('[data-column="balanced"]') as HTMLElement;
    this.sliderRoot = root.querySelector(".slider-root") as HTMLElement;
    this.chartSvg = root.querySelector("svg.dashboard") as unknown as SVGSVGElement;

    const filterInput = root.querySelector(".filter-input") as HTMLInputElement;
    filterInput.addEventListener("input", () => {
      if (this.state) {
        this.state.filter = filterInput.value;
        this.renderFeeds();
      }
    });

    (root.querySelector(".banner-dismiss") as HTMLElement).addEventListener(
      "click",
      () => {
        if (this.state) {
          this.state.banner = null;
        }
        this.renderBanner();
      },
    );

    this.scheduleConstraintPush = trailingDebounce(
      CONSTRAINT_DEBOUNCE_MS,
      (lower: number, upper: number) => void this.pushConstraints(lower, upper),
    );
  }

  get isPending(): boolean {
    return this.pending;
  }

  async start(seed?: number): Promise<void> {
    const created = await createSession(seed === undefined ? {} : { seed });
    this.state = {
      sessionId: created.session_id,
      iteration: created.iteration,
      feeds: created.feeds,
      constraints: created.constraints,
      history: created.history.slice(),
      filter: "",
      banner: null,
    };
    this.slider = new ConstraintSlider(
      this.sliderRoot,
      created.constraints.lower_liberal,
      created.constraints.upper_liberal,
      (lower, upper) => this.scheduleConstraintPush(lower, upper),
    );
    this.renderAll();
  }

  // ----- mutations ------------------------------------------------

  private async handleArticleClick(feed: FeedName, slot: Slot): Promise<void> {
    const state = this.state;
    if (!state || this.pending) {
      return;
    }
    this.pending = true;
    this.renderBusy();
    const call = postClick(state.sessionId, feed, slot.id);
    // report first, then open; the tab does not wait for the response
    this.openArticle(slot.url);
    try {
      const resp = await call;
      state.iteration = resp.iteration;
      state.feeds = resp.feeds;
      state.history.push(resp.history_point);
    } catch (err) {
      await this.recoverFromClickError(err);
    } finally {
      this.pending = false;
      this.renderAll();
      this.drainQueue();
    }
  }

  private async recoverFromClickError(err: unknown): Promise<void> {
    const state = this.state;
    if (!state) {
      return;
    }
    if (err instanceof ApiError && err.status === 409) {
      // stale page: someone else moved the session, resync
      try {
        const fresh = await getFeeds(state.sessionId);
        state.iteration = fresh.iteration;
        state.feeds = fresh.feeds;
        state.constraints = fresh.constraints;
        state.banner = "that page was stale; feeds refreshed, click again";
      } catch {
        state.banner = "service unreachable; showing the last known pages";
      }
    } else {
      state.banner = `click not recorded: ${errorText(err)}`;
    }
  }

  private async pushConstraints(lower: number, upper: number): Promise<void> {
    const state = this.state;
    if (!state) {
      return;
    }
    if (this.pending) {
      this.queuedConstraints = { lower, upper };
      return;
    }
    this.pending = true;
    this.renderBusy();
    try {
      const resp = await putConstraints(state.sessionId, lower, upper);
      state.iteration = resp.iteration;
      state.feeds = resp.feeds;
      state.constraints = resp.constraints;
      state.history.push(resp.history_point);
      if (!this.queuedConstraints && this.slider) {
        this.slider.set(
          resp.constraints.lower_liberal,
          resp.constraints.upper_liberal,
        );
      }
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        // server refused the range: put the handles back where the
        // server last confirmed them
        this.queuedConstraints = null;
        if (this.slider) {
          this.slider.set(
            state.constraints.lower_liberal,
            state.constraints.upper_liberal,
          );
        }
        state.banner = `bounds rejected: ${errorText(err)}`;
      } else {
        state.banner = `bounds not saved: ${errorText(err)}`;
      }
    } finally {
      this.pending = false;
      this.renderAll();
      this.drainQueue();
    }
  }

  private drainQueue(): void {
    if (this.queuedConstraints && !this.pending) {
      const next = this.queuedConstraints;
      this.queuedConstraints = null;
      void this.pushConstraints(next.lower, next.upper);
    }
  }

  // ----- rendering ------------------------------------------------

  private renderAll(): void {
    this.renderFeeds();
    this.renderBanner();
    this.renderBusy();
    if (this.state) {
      renderChart(this.chartSvg, this.state.history);
      this.iterationBadge.textContent = `iteration ${this.state.iteration}`;
    }
  }

  private renderFeeds(): void {
    const state = this.state;
    if (!state) {
      return;
    }
    const onClick = (feed: FeedName, slot: Slot) =>
      void this.handleArticleClick(feed, slot);
    renderFeedColumn(
      this.unfilteredColumn,
      "unfiltered",
      state.feeds.unfiltered,
      state.filter,
      onClick,
    );
    renderFeedColumn(
      this.balancedColumn,
      "balanced",
      state.feeds.balanced,
      state.filter,
      onClick,
    );
  }

  private renderBanner(): void {
    const message = this.state?.banner ?? null;
    this.banner.hidden = message === null;
    this.bannerText.textContent = message ?? "";
  }

  private renderBusy(): void {
    this.main.classList.toggle("busy", this.pending);
    this.main.setAttribute("aria-busy", String(this.pending));
  }
}

function errorText(err: unknown): string {
  if (err instanceof ApiError) {
    return err.message;
  }
  return String(err);
}
