import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { allEntities, readScene, vec3Attr } from "../src/scene.js";

const DEMO = join(__dirname, "..", "..", "demo");

function load(name: string) {
  return readScene(readFileSync(join(DEMO, name), "utf8"));
}

describe("apartment scene", () => {
  const doc = load("apartment.html");

  it("indexes every named entity", () => {
    for (const id of [
      "stage",
      "cameraRig",
      "room1",
      "room2",
      "puzzle1",
      "puzzle2",
      "doorBars",
      "hintPanel",
      "watch",
    ]) {
      expect(doc.byId.has(id), id).toBe(true);
    }
  });

  it("keeps classes and raw attributes", () => {
    const stage = doc.byId.get("stage")!;
    expect(stage.tag).toBe("a-gltf-model");
    expect(stage.classes).toContain("navmesh");
    expect(stage.attrs["src"]).toBe("#apartment");
    const bars = doc.byId.get("doorBars")!;
    expect(bars.attrs["navmesh-blocker"]).toContain("apartmentDoorway");
  });

  it("reads vector attributes", () => {
    expect(vec3Attr(doc.byId.get("cameraRig")!, "position")).toEqual([1, 0, 1]);
    expect(vec3Attr(doc.byId.get("puzzle2")!, "position")).toEqual([8, 0.5, 4]);
    expect(vec3Attr(doc.byId.get("stage")!, "position")).toEqual([0, 0, 0]);
  });

  it("drops comments entirely", () => {
    for (const entity of allEntities(doc)) {
      expect(entity.text).not.toContain("Bars across");
    }
  });

  it("captures panel copy for rendering", () => {
    const panel = doc.byId.get("hintPanel")!;
    const h1 = panel.children.find((c) => c.tag === "h1");
    expect(h1?.text.trim()).toBe("Find the key");
  });
});

describe("lobby scene", () => {
  const doc = load("index.html");

  it("finds the room link", () => {
    const panel = doc.byId.get("lobbyPanel")!;
    const anchor = panel.children.find((c) => c.tag === "a");
    expect(anchor?.attrs["href"]).toBe("/apartment.html");
    expect(anchor?.text.trim()).toBe("The Apartment");
  });

  it("keeps document order", () => {
    const tags = allEntities(doc).map((e) => e.tag);
    expect(tags.indexOf("a-plane")).toBeLessThan(tags.indexOf("a-entity"));
  });
});

describe("scanner edge cases", () => {
  it("handles self-closing tags and bare attributes", () => {
    const doc = readScene('<a-scene><a-box id="b" solid width=2/></a-scene>');
    const box = doc.byId.get("b")!;
    expect(box.attrs["solid"]).toBe("");
    expect(box.attrs["width"]).toBe("2");
    expect(box.children).toEqual([]);
  });

  it("keeps angle brackets inside quoted attributes", () => {
    const doc = readScene('<a-entity id="e" data-x="a > b"></a-entity>');
    expect(doc.byId.get("e")!.attrs["data-x"]).toBe("a > b");
  });

  it("recovers from a stray close tag", () => {
    const doc = readScene("<a-scene></p><a-box id=\"b\"></a-box></a-scene>");
    expect(doc.byId.has("b")).toBe(true);
  });
});
