// Rule-review app: a thin projection of the curation service. Everything
// shown comes from service responses; the only client-side state is the
// current filter/sort/page selection and unsaved text boxes. Mutations
// echo the version they read and prompt a reload on 409 instead of ever
// overwriting a concurrent edit.

import {
  ConflictError,
  Intervention,
  ItemRow,
  RuleRow,
  Stats,
  Weights,
  exportClassifier,
  getStats,
  getWeights,
  interventionId,
  listItems,
  listRules,
  patchRule,
  putItem,
  putWeights,
} from "./api.js";

interface ViewState {
  page: number;
  pageSize: number;
  sort: string;
  kept: "all" | "kept" | "removed";
  actionable: "all" | "yes" | "no";
  feature: string;
}

export class App {
  private root: HTMLElement;
  private state: ViewState = {
    page: 1,
    pageSize: 50,
    sort: "confidence",
    kept: "all",
    actionable: "all",
    feature: "",
  };
  private rules: RuleRow[] = [];
  private total = 0;
  private items: ItemRow[] = [];
  private stats: Stats | null = null;
  private weights: Weights = { weights: {}, version: 0 };

  constructor(root: HTMLElement) {
    this.root = root;
  }

  async refresh(): Promise<void> {
    const query: Parameters<typeof listRules>[0] = {
      page: this.state.page,
      page_size: this.state.pageSize,
      sort: this.state.sort,
    };
    if (this.state.kept !== "all") query.kept = this.state.kept === "kept";
    if (this.state.actionable !== "all") query.actionable = this.state.actionable === "yes";
    const [page, items, stats, weights] = await Promise.all([
      listRules(query),
      listItems(),
      getStats(),
      getWeights(),
    ]);
    this.rules = page.rules;
    this.total = page.total;
    this.items = items;
    this.stats = stats;
    this.weights = weights;
    this.render();
  }

  // -- mutations -------------------------------------------------------

  private async mutate(action: () => Promise<unknown>): Promise<void> {
    try {
      await action();
      await this.refresh();
    } catch (err) {
      if (err instanceof ConflictError) {
        this.showConflict(err.message);
      } else {
        this.showError(err instanceof Error ? err.message : String(err));
      }
    }
  }

  toggleKept(rule: RuleRow): Promise<void> {
    return this.mutate(() =>
      patchRule(rule.id, { version: rule.version, kept: !rule.kept })
    );
  }

  addRuleIntervention(rule: RuleRow, text: string, target: string): Promise<void> {
    const intervention: Intervention = { id: interventionId(text), text, target };
    return this.mutate(() =>
      patchRule(rule.id, {
        version: rule.version,
        interventions: [...rule.interventions, intervention],
      })
    );
  }

  // Accepting a suggestion attaches the item's intervention to the rule;
  // suggestions themselves are never auto-attached.
  acceptSuggestion(rule: RuleRow, suggestion: Intervention): Promise<void> {
    if (rule.interventions.some((iv) => iv.id === suggestion.id)) {
      return Promise.resolve();
    }
    return this.mutate(() =>
      patchRule(rule.id, {
        version: rule.version,
        interventions: [...rule.interventions, suggestion],
      })
    );
  }

  removeRuleIntervention(rule: RuleRow, id: string): Promise<void> {
    return this.mutate(() =>
      patchRule(rule.id, {
        version: rule.version,
        interventions: rule.interventions.filter((iv) => iv.id !== id),
      })
    );
  }

  addItemIntervention(item: ItemRow, text: string): Promise<void> {
    const intervention: Intervention = { id: interventionId(text), text, target: "item" };
    return this.mutate(() =>
      putItem(item.item_id, {
        version: item.version,
        interventions: [...item.interventions, intervention],
      })
    );
  }

  setItemCategory(item: ItemRow, category: string): Promise<void> {
    return this.mutate(() => putItem(item.item_id, { version: item.version, category }));
  }

  setWeight(category: string, weight: number): Promise<void> {
    return this.mutate(() =>
      putWeights({
        version: this.weights.version,
        weights: { ...this.weights.weights, [category]: weight },
      })
    );
  }

  runExport(): Promise<void> {
    return this.mutate(async () => {
      const result = await exportClassifier();
      this.showNotice(
        `exported ${result.total} rules (${result.actionable} actionable, ` +
          `${result.unreviewed} unreviewed) to ${result.path}`
      );
    });
  }

  // -- dialogs ---------------------------------------------------------

  private showConflict(detail: string): void {
    const dialog = el("div", { class: "dialog conflict", "data-testid": "conflict-dialog" });
    dialog.append(
      el("p", {}, "Someone else changed this record while you were editing."),
      el("p", { class: "detail" }, detail),
      button("Reload", { "data-testid": "conflict-reload" }, () => {
        dialog.remove();
        void this.refresh();
      })
    );
    this.root.append(dialog);
  }

  private showError(message: string): void {
    const banner = el("div", { class: "banner error", "data-testid": "error-banner" });
    banner.append(
      el("span", {}, `Request failed: ${message}`),
      button("Retry", {}, () => {
        banner.remove();
        void this.refresh();
      })
    );
    this.root.append(banner);
  }

  private showNotice(message: string): void {
    const note = el("div", { class: "banner notice", "data-testid": "notice" }, message);
    this.root.append(note);
    setTimeout(() => note.remove(), 4000);
  }

  // -- rendering -------------------------------------------------------

  private visibleRules(): RuleRow[] {
    const needle = this.state.feature.trim().toLowerCase();
    if (!needle) return this.rules;
    return this.rules.filter((r) =>
      r.item_keys.some((key) => key.toLowerCase().includes(needle))
    );
  }

  render(): void {
    this.root.replaceChildren();
    this.root.append(this.renderHeader(), this.renderControls());
    const visible = this.visibleRules();
    if (this.total === 0) {
      this.root.append(
        el("div", { class: "empty", "data-testid": "empty-state" },
          "No rules loaded. Point the service at a mined rule file.")
      );
    } else {
      this.root.append(this.renderTable(visible), this.renderPager());
    }
    this.root.append(this.renderItemsPanel(), this.renderWeightsPanel());
  }

  private renderHeader(): HTMLElement {
    const header = el("header", { "data-testid": "stats-header" });
    const s = this.stats;
    if (!s) return header;
    const cascade = s.stage_counts.length ? `cascade ${s.stage_counts.join(" > ")} - ` : "";
    header.append(
      el("h1", {}, "Rule review"),
      el(
        "p",
        { class: "stats" },
        `${cascade}${s.total_rules} rules - ${s.kept} kept - ${s.removed} removed - ` +
          `${s.actionable} actionable - ${s.unreviewed} unreviewed`
      ),
      button("Export classifier", { "data-testid": "export" }, () => void this.runExport())
    );
    return header;
  }

  private renderControls(): HTMLElement {
    const controls = el("div", { class: "controls" });
    controls.append(
      select("kept-filter", ["all", "kept", "removed"], this.state.kept, (v) => {
        this.state.kept = v as ViewState["kept"];
        this.state.page = 1;
        void this.refresh();
      }),
      select("actionable-filter", ["all", "yes", "no"], this.state.actionable, (v) => {
        this.state.actionable = v as ViewState["actionable"];
        this.state.page = 1;
        void this.refresh();
      }),
      select("sort", ["confidence", "support", "length", "id"], this.state.sort, (v) => {
        this.state.sort = v;
        void this.refresh();
      })
    );
    const feature = el("input", {
      type: "text",
      placeholder: "filter by feature",
      value: this.state.feature,
      "data-testid": "feature-filter",
    }) as HTMLInputElement;
    feature.addEventListener("input", () => {
      this.state.feature = feature.value;
      const table = this.root.querySelector("[data-testid=rule-table]");
      if (table) {
        const replacement = this.renderTable(this.visibleRules());
        table.replaceWith(replacement);
      }
    });
    controls.append(feature);
    return controls;
  }

  private renderTable(rules: RuleRow[]): HTMLElement {
    const table = el("table", { "data-testid": "rule-table" });
    const head = el("tr", {});
    for (const title of ["Rule", "Class", "Confidence", "Support", "Kept", "Interventions", "Suggestions"]) {
      head.append(el("th", {}, title));
    }
    table.append(el("thead", {}, head));
    const body = el("tbody", {});
    for (const rule of rules) {
      body.append(this.renderRuleRow(rule));
    }
    table.append(body);
    return table;
  }

  private renderRuleRow(rule: RuleRow): HTMLElement {
    const row = el("tr", {
      "data-testid": "rule-row",
      "data-rule-id": rule.id,
      "data-version": String(rule.version),
      class: rule.kept ? "kept" : "removed",
    });
    row.append(
      el("td", { class: "lhs" }, rule.lhs),
      el("td", {}, rule.class_value),
      el("td", { class: "num" }, pct(rule.confidence)),
      el("td", { class: "num" }, pct(rule.support))
    );

    const keptCell = el("td", {});
    keptCell.append(
      el("span", { "data-testid": "kept-state" }, rule.kept ? "kept" : "removed"),
      button(rule.kept ? "Remove" : "Keep", { "data-testid": "toggle-kept" }, () =>
        void this.toggleKept(rule)
      )
    );
    row.append(keptCell);

    const ivCell = el("td", { "data-testid": "rule-interventions" });
    for (const iv of rule.interventions) {
      const chip = el("span", { class: "chip", "data-iv-id": iv.id }, iv.text);
      chip.append(button("x", { class: "tiny", title: "remove intervention" }, () =>
        void this.removeRuleIntervention(rule, iv.id)
      ));
      ivCell.append(chip);
    }
    const input = el("input", {
      type: "text",
      placeholder: "new intervention",
      "data-testid": "rule-intervention-input",
    }) as HTMLInputElement;
    const targetPick = select("intervention-target", ["item", "outcome"], "item", () => {});
    ivCell.append(
      input,
      targetPick,
      button("Add", { "data-testid": "rule-intervention-add" }, () => {
        const text = input.value.trim();
        if (text) {
          void this.addRuleIntervention(rule, text, (targetPick as HTMLSelectElement).value);
        }
      })
    );
    row.append(ivCell);

    const sgCell = el("td", { "data-testid": "rule-suggestions" });
    for (const suggestion of rule.suggestions) {
      const attached = rule.interventions.some((iv) => iv.id === suggestion.id);
      const chip = el("span", { class: "chip suggestion", "data-iv-id": suggestion.id }, suggestion.text);
      if (!attached) {
        chip.append(button("accept", { class: "tiny", "data-testid": "accept-suggestion" }, () =>
          void this.acceptSuggestion(rule, suggestion)
        ));
      }
      sgCell.append(chip);
    }
    row.append(sgCell);
    return row;
  }

  private renderPager(): HTMLElement {
    const pager = el("div", { class: "pager" });
    const pages = Math.max(1, Math.ceil(this.total / this.state.pageSize));
    pager.append(
      button("Prev", { "data-testid": "page-prev", disabled: this.state.page <= 1 ? "disabled" : undefined }, () => {
        if (this.state.page > 1) {
          this.state.page -= 1;
          void this.refresh();
        }
      }),
      el("span", { "data-testid": "page-label" }, `page ${this.state.page} / ${pages}`),
      button("Next", { "data-testid": "page-next", disabled: this.state.page >= pages ? "disabled" : undefined }, () => {
        if (this.state.page < pages) {
          this.state.page += 1;
          void this.refresh();
        }
      })
    );
    return pager;
  }

  private renderItemsPanel(): HTMLElement {
    const panel = el("section", { "data-testid": "items-panel" });
    panel.append(el("h2", {}, "Items"));
    const list = el("ul", {});
    for (const item of this.items) {
      const li = el("li", { "data-item-id": item.item_id });
      li.append(el("span", { class: "rendered" }, item.rendered));
      const ivWrap = el("span", { "data-testid": "item-interventions" });
      for (const iv of item.interventions) {
        ivWrap.append(el("span", { class: "chip" }, iv.text));
      }
      li.append(ivWrap);
      const ivInput = el("input", {
        type: "text",
        placeholder: "item intervention",
        "data-testid": "item-intervention-input",
      }) as HTMLInputElement;
      li.append(
        ivInput,
        button("Add", { "data-testid": "item-intervention-add" }, () => {
          const text = ivInput.value.trim();
          if (text) void this.addItemIntervention(item, text);
        })
      );
      const catInput = el("input", {
        type: "text",
        placeholder: "category",
        value: item.category,
        "data-testid": "item-category-input",
      }) as HTMLInputElement;
      li.append(
        catInput,
        button("Set category", { "data-testid": "item-category-set" }, () => {
          void this.setItemCategory(item, catInput.value.trim());
        })
      );
      list.append(li);
    }
    panel.append(list);
    return panel;
  }

  private renderWeightsPanel(): HTMLElement {
    const panel = el("section", { "data-testid": "weights-panel" });
    panel.append(el("h2", {}, "Category weights"));
    const list = el("ul", {});
    for (const [category, weight] of Object.entries(this.weights.weights)) {
      list.append(el("li", {}, `${category}: ${weight}`));
    }
    panel.append(list);
    const cat = el("input", { type: "text", placeholder: "category", "data-testid": "weight-category" }) as HTMLInputElement;
    const val = el("input", { type: "number", step: "0.1", placeholder: "weight", "data-testid": "weight-value" }) as HTMLInputElement;
    panel.append(
      cat,
      val,
      button("Set weight", { "data-testid": "weight-set" }, () => {
        const weight = Number(val.value);
        if (cat.value.trim() && weight > 0) {
          void this.setWeight(cat.value.trim(), weight);
        }
      })
    );
    return panel;
  }
}

// -- tiny DOM helpers ----------------------------------------------------

function el(tag: string, attrs: Record<string, string | undefined> = {}, text?: string | HTMLElement): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (value !== undefined) node.setAttribute(key, value);
  }
  if (typeof text === "string") node.textContent = text;
  else if (text) node.append(text);
  return node;
}

function button(label: string, attrs: Record<string, string | undefined>, onClick: () => void): HTMLElement {
  const node = el("button", { type: "button", ...attrs }, label);
  node.addEventListener("click", onClick);
  return node;
}

function select(testId: string, options: string[], current: string, onChange: (value: string) => void): HTMLElement {
  const node = el("select", { "data-testid": testId }) as HTMLSelectElement;
  for (const option of options) {
    const o = el("option", { value: option }, option) as HTMLOptionElement;
    if (option === current) o.selected = true;
    node.append(o);
  }
  node.addEventListener("change", () => onChange(node.value));
  return node;
}

function pct(x: number): string {
  return `${(100 * x).toFixed(1)}%`;
}

export async function mount(root: HTMLElement): Promise<App> {
  const app = new App(root);
  await app.refresh();
  return app;
}
