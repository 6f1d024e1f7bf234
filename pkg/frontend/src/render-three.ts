/**
 * three.js mirror of the scene document.
 *
 * One Group per entity, named by id (or tag when anonymous), so the
 * graph can be addressed with the same ids the engine uses in frame
 * reports. Geometry is placeholder-level on purpose: the engine decides
 * everything that matters, the viewer just shows it.
 */

import * as THREE from "three";

import { SceneDoc, SceneEntity, allEntities, vec3Attr } from "./scene.js";

export interface RenderGraph {
  scene: THREE.Scene;
  rig: THREE.Group;
  byId: Map<string, THREE.Object3D>;
}

function nodeFor(entity: SceneEntity): THREE.Object3D {
  const group = new THREE.Group();
  group.name = entity.id ?? entity.tag;
  const [x, y, z] = vec3Attr(entity, "position");
  group.position.set(x, y, z);
  const [rx, ry, rz] = vec3Attr(entity, "rotation");
  group.rotation.set(
    THREE.MathUtils.degToRad(rx),
    THREE.MathUtils.degToRad(ry),
    THREE.MathUtils.degToRad(rz),
  );
  return group;
}

export function buildRenderGraph(doc: SceneDoc): RenderGraph {
  const scene = new THREE.Scene();
  const byId = new Map<string, THREE.Object3D>();
  const attach = (entity: SceneEntity, parent: THREE.Object3D) => {
    const node = nodeFor(entity);
    parent.add(node);
    if (entity.id) byId.set(entity.id, node);
    entity.children.forEach((c) => attach(c, node));
  };
  for (const top of doc.root.children) {
    if (top.tag === "a-scene") {
      top.children.forEach((c) => attach(c, scene));
    } else {
      attach(top, scene);
    }
  }
  let rig = byId.get("cameraRig") as THREE.Group | undefined;
  if (!rig) {
    rig = new THREE.Group();
    rig.name = "cameraRig";
    scene.add(rig);
  }
  return { scene, rig, byId };
}

export function setVisibility(graph: RenderGraph, id: string, visible: boolean): void {
  const node = graph.byId.get(id);
  if (node) node.visible = visible;
}

export function moveRig(
  graph: RenderGraph,
  position: [number, number, number],
  yaw: number,
): void {
  graph.rig.position.set(position[0], position[1], position[2]);
  graph.rig.rotation.set(0, yaw, 0);
}

/** Ids of every named node currently in the graph. */
export function graphIds(graph: RenderGraph): Set<string> {
  return new Set(graph.byId.keys());
}

/** Ids of every named entity in the scene document. */
export function documentIds(doc: SceneDoc): Set<string> {
  return new Set(
    allEntities(doc)
      .map((e) => e.id)
      .filter((id): id is string => id !== null),
  );
}
