import { colorForType } from "./colors";
import type { FeedName, Page, Slot } from "./types";

export type ArticleClickHandler = (feed: FeedName, slot: Slot) => void;

const FEED_TITLES: Record<FeedName, string> = {
  unfiltered: "Unfiltered news",
  balanced: "Balanced news",
};

function countsLine(page: Page): string {
  return Object.entries(page.counts)
    .map(([name, count]) => `${count} ${name}`)
    .join(" / ");
}

/** Rebuild one feed column from a page object.
 *
 * The column is replaced wholesale, so click listeners never stack
 * across renders: one activation, one handler call. Links keep a real
 * href and target for accessibility; the handler intercepts activation
 * to report the click before the article opens.
 */
export function renderFeedColumn(
  container: HTMLElement,
  feed: FeedName,
  page: Page,
  filter: string,
  onClick: ArticleClickHandler,
): void {
  container.replaceChildren();
  container.dataset.feed = feed;

  const heading = document.createElement("h2");
  heading.textContent = FEED_TITLES[feed];
  container.appendChild(heading);

  const meta = document.createElement("p");
  meta.className = "feed-meta";
  meta.textContent = `iteration ${page.iteration} · ${countsLine(page)}`;
  container.appendChild(meta);

  const list = document.createElement("ul");
  list.className = "article-list";
  const needle = filter.trim().toLowerCase();

  for (const slot of page.slots) {
    const item = document.createElement("li");
    if (needle && !slot.title.toLowerCase().includes(needle)) {
      item.hidden = true;
    }

    const link = document.createElement("a");
    link.className = "article";
    link.href = slot.url;
    link.target = "_blank";
    link.rel = "noopener";
    link.textContent = slot.title;
    link.style.color = colorForType(slot.type);
    link.dataset.articleId = slot.id;
    link.dataset.articleType = slot.type;
    link.addEventListener("click", (event) => {
      event.preventDefault();
      onClick(feed, slot);
    });
    item.appendChild(link);

    const source = document.createElement("span");
    source.className = "article-source";
    source.textContent = ` ${slot.source_domain}`;
    item.appendChild(source);

    list.appendChild(item);
  }

  container.appendChild(list);
}
