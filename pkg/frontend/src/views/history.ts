import { clear, htmlEl } from "../svg";
import type { HistoryNodeDto, HistoryTreeDto } from "../types";

export interface HistoryCallbacks {
  onRestore: (nodeId: string) => void;
  onAnnotate: (nodeId: string, text: string) => void;
}

/**
 * History list with branch tabs. The list walks the active path from the
 * root; wherever a node has several children the branches appear as tabs
 * and the path follows the selected one (by default the branch holding the
 * cursor, else the newest).
 */
export function renderHistory(
  container: HTMLElement,
  tree: HistoryTreeDto | null,
  callbacks: HistoryCallbacks,
  tabChoices: Map<string, string> = new Map()
): void {
  clear(container);
  if (!tree || !tree.nodes.length) {
    container.appendChild(htmlEl("p", "placeholder", "no history yet"));
    return;
  }
  const byId = new Map(tree.nodes.map((n) => [n.node_id, n]));
  const children = new Map<string | null, HistoryNodeDto[]>();
  for (const node of tree.nodes) {
    const list = children.get(node.parent_id) ?? [];
    list.push(node);
    children.set(node.parent_id, list);
  }
  for (const list of children.values()) list.sort((a, b) => a.created_at - b.created_at);

  // nodes on the path from the cursor up to the root
  const onCursorPath = new Set<string>();
  let walk = tree.cursor ? byId.get(tree.cursor) : undefined;
  while (walk) {
    onCursorPath.add(walk.node_id);
    walk = walk.parent_id ? byId.get(walk.parent_id) : undefined;
  }

  const list = htmlEl("ol", "history-list");
  let current: HistoryNodeDto | undefined = children.get(null)?.[0];
  while (current) {
    const node: HistoryNodeDto = current;
    const item = htmlEl("li", "history-entry" + (node.node_id === tree.cursor ? " cursor" : ""));
    item.dataset.nodeId = node.node_id;

    const restore = htmlEl("button", "restore", node.state.label);
    restore.addEventListener("click", () => callbacks.onRestore(node.node_id));
    item.appendChild(restore);

    if (node.annotation) item.appendChild(htmlEl("span", "annotation", node.annotation));
    const annotate = htmlEl("button", "annotate", "✎");
    annotate.addEventListener("click", () => {
      const input = htmlEl("input", "annotation-input");
      input.value = node.annotation ?? "";
      input.addEventListener("change", () => callbacks.onAnnotate(node.node_id, input.value));
      item.appendChild(input);
      input.focus();
    });
    item.appendChild(annotate);
    list.appendChild(item);

    const kids: HistoryNodeDto[] = children.get(node.node_id) ?? [];
    if (kids.length > 1) {
      // divergent exploration paths surface as tabs at the branch point
      const chosen =
        tabChoices.get(node.node_id) ??
        kids.find((k) => onCursorPath.has(k.node_id))?.node_id ??
        kids[kids.length - 1].node_id;
      const tabs = htmlEl("li", "branch-tabs");
      kids.forEach((kid, i) => {
        const tab = htmlEl(
          "button",
          "branch-tab" + (kid.node_id === chosen ? " active" : ""),
          `branch ${i + 1}`
        );
        tab.dataset.branchOf = node.node_id;
        tab.dataset.headNode = kid.node_id;
        tab.addEventListener("click", () => {
          tabChoices.set(node.node_id, kid.node_id);
          renderHistory(container, tree, callbacks, tabChoices);
        });
        tabs.appendChild(tab);
      });
      list.appendChild(tabs);
      current = byId.get(chosen);
    } else {
      current = kids[0];
    }
  }
  container.appendChild(list);
}
