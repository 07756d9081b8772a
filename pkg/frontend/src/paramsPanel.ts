// Per-component property editor (the right-hand side panel). Edits call
// back with (componentId, field, value); validation findings render inline
// next to the offending field.

import type { ComponentDoc, ValidationFinding } from "./types.js";
import { propertyFields } from "./state.js";

export class ParamsPanel {
  onEdit: ((componentId: string, field: string, value: number) => void) | null = null;

  constructor(private root: HTMLElement) {
    this.root.innerHTML = '<div class="params-empty">select a component</div>';
  }

  clear(): void {
    this.root.innerHTML = '<div class="params-empty">select a component</div>';
  }

  show(component: ComponentDoc, findings: ValidationFinding[] = []): void {
    const byField = new Map<string, string>();
    for (const finding of findings) {
      if (finding.subject !== component.id) continue;
      const field = finding.message.split(" ")[0];
      byField.set(field, finding.message);
    }
    const rows = propertyFields(component.kind)
      .map((field) => {
        const value = component.properties[field];
        const problem = byField.get(field);
        const error = problem
          ? `<div class="field-error" data-field-error="${field}">${problem}</div>`
          : "";
        return (
          `<label class="param-row" data-field="${field}"><span>${field}</span>` +
          `<input type="number" step="any" name="${field}" value="${value}" />${error}</label>`
        );
      })
      .join("");
    this.root.innerHTML =
      `<h3>${component.label} <small>(${component.kind})</small></h3>` +
      `<form class="params-form">${rows}</form>`;
    for (const input of this.root.querySelectorAll("input")) {
      input.addEventListener("change", () => {
        const value = Number((input as HTMLInputElement).value);
        this.onEdit?.(component.id, (input as HTMLInputElement).name, value);
      });
    }
  }
}
