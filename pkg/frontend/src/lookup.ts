// Species lookup dialog: query -> match list -> derived parameters with
// per-parameter method badges (Direct / AncestryEstimate / Default).

import type { ApiClient } from "./api.js";
import type { ParametersResponse, TaxonMatch } from "./types.js";

export interface LookupResult {
  taxonId: string;
  response: ParametersResponse;
}

export class LookupDialog {
  onApply: ((result: LookupResult) => void) | null = null;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
  ) {
    this.root.innerHTML = `
      <div class="lookup-box">
        <div class="lookup-row">
          <input type="text" class="lookup-query" placeholder="species name" />
          <button class="lookup-search">Lookup species</button>
        </div>
        <ul class="lookup-results"></ul>
        <div class="lookup-status"></div>
        <div class="lookup-preview"></div>
      </div>`;
    this.query().addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Enter") void this.search();
    });
    this.button().addEventListener("click", () => void this.search());
  }

  private query(): HTMLInputElement {
    return this.root.querySelector(".lookup-query") as HTMLInputElement;
  }

  private button(): HTMLButtonElement {
    return this.root.querySelector(".lookup-search") as HTMLButtonElement;
  }

  private results(): HTMLUListElement {
    return this.root.querySelector(".lookup-results") as HTMLUListElement;
  }

  private status(): HTMLElement {
    return this.root.querySelector(".lookup-status") as HTMLElement;
  }

  private preview(): HTMLElement {
    return this.root.querySelector(".lookup-preview") as HTMLElement;
  }

  async search(): Promise<void> {
    const text = this.query().value.trim();
    if (!text) return;
    this.status().textContent = "searching…";
    let matches: TaxonMatch[];
    try {
      matches = await this.api.searchSpecies(text);
    } catch {
      this.status().textContent = "trait backend unavailable; fixtures still usable";
      this.status().className = "lookup-status banner-error";
      return;
    }
    this.status().className = "lookup-status";
    this.results().innerHTML = "";
    if (matches.length === 0) {
      this.status().textContent = "no species matched";
      return;
    }
    this.status().textContent = `${matches.length} match(es)`;
    for (const match of matches) {
      const item = this.root.ownerDocument.createElement("li");
      item.setAttribute("data-taxon", match.taxon_id);
      item.textContent = `${match.canonical_name} (${match.common_names.join(", ")})`;
      item.addEventListener("click", () => void this.select(match.taxon_id));
      this.results().appendChild(item);
    }
  }

  async select(taxonId: string): Promise<void> {
    const response = await this.api.speciesParameters(taxonId);
    const rows = response.report.entries
      .map(
        (entry) =>
          `<tr><td>${entry.parameter}</td><td>${entry.value}</td>` +
          `<td><span class="badge badge-${entry.method.toLowerCase()}">${entry.method}</span></td></tr>`,
      )
      .join("");
    this.preview().innerHTML =
      `<table class="param-table"><thead><tr><th>parameter</th><th>value</th><th>method</th></tr></thead>` +
      `<tbody>${rows}</tbody></table><button class="lookup-apply">Apply to selected component</button>`;
    const apply = this.preview().querySelector(".lookup-apply") as HTMLButtonElement;
    apply.addEventListener("click", () => this.onApply?.({ taxonId, response }));
  }
}
