/**
 * Minimal scene reader.
 *
 * The engine owns the real grammar; the viewer only needs the entity tree
 * (tags, ids, classes, raw attributes) to mirror the scene as a render
 * graph, so this is a small tolerant scanner rather than a second parser.
 */

export interface SceneEntity {
  tag: string;
  id: string | null;
  classes: string[];
  attrs: Record<string, string>;
  children: SceneEntity[];
  text: string;
}

export interface SceneDoc {
  root: SceneEntity;
  byId: Map<string, SceneEntity>;
}

const TAG_RE = /<(\/?)([a-zA-Z][\w-]*)((?:[^>"']|"[^"]*"|'[^']*')*?)(\/?)>/g;
const ATTR_RE = /([\w-]+)(?:\s*=\s*("([^"]*)"|'([^']*)'|[^\s>]+))?/g;

function parseAttrs(raw: string): Record<string, string> {
  const attrs: Record<string, string> = {};
  for (const m of raw.matchAll(ATTR_RE)) {
    const name = m[1];
    if (m[2] === undefined) {
      attrs[name] = "";
    } else if (m[3] !== undefined) {
      attrs[name] = m[3];
    } else if (m[4] !== undefined) {
      attrs[name] = m[4];
    } else {
      attrs[name] = m[2];
    }
  }
  return attrs;
}

export function readScene(text: string): SceneDoc {
  const clean = text.replace(/<!--[\s\S]*?-->/g, "");
  const root: SceneEntity = {
    tag: "#document",
    id: null,
    classes: [],
    attrs: {},
    children: [],
    text: "",
  };
  const stack: SceneEntity[] = [root];
  let last = 0;
  for (const m of clean.matchAll(TAG_RE)) {
    const [whole, closing, tag, rawAttrs, selfClose] = m;
    const textBefore = clean.slice(last, m.index);
    if (textBefore.trim()) {
      stack[stack.length - 1].text += textBefore.trim() + " ";
    }
    last = (m.index ?? 0) + whole.length;
    if (closing) {
      for (let i = stack.length - 1; i > 0; i--) {
        if (stack[i].tag === tag) {
          stack.length = i;
          break;
        }
      }
      continue;
    }
    const attrs = parseAttrs(rawAttrs);
    const entity: SceneEntity = {
      tag,
      id: attrs.id ?? null,
      classes: (attrs.class ?? "").split(/\s+/).filter(Boolean),
      attrs,
      children: [],
      text: "",
    };
    stack[stack.length - 1].children.push(entity);
    if (!selfClose) {
      stack.push(entity);
    }
  }
  const byId = new Map<string, SceneEntity>();
  const walk = (e: SceneEntity) => {
    if (e.id) byId.set(e.id, e);
    e.children.forEach(walk);
  };
  walk(root);
  return { root, byId };
}

/** Every element in document order, excluding the synthetic root. */
export function allEntities(doc: SceneDoc): SceneEntity[] {
  const out: SceneEntity[] = [];
  const walk = (e: SceneEntity) => {
    if (e.tag !== "#document") out.push(e);
    e.children.forEach(walk);
  };
  walk(doc.root);
  return out;
}

/** Plain-number triple from attributes like position="1 0 1". */
export function vec3Attr(
  entity: SceneEntity,
  name: string,
): [number, number, number] {
  const raw = entity.attrs[name];
  if (!raw) return [0, 0, 0];
  const parts = raw.trim().split(/\s+/).map(Number);
  return [parts[0] ?? 0, parts[1] ?? 0, parts[2] ?? 0];
}
