/**
 * Input mapping: keyboard/controller state in, engine input items out.
 *
 * The engine expects plain intents (move deltas, pointer rays, events),
 * so the only math here is turning devices into those intents. Nothing
 * in this file knows what a puzzle is.
 */

import * as THREE from "three";

import { EngineInput } from "./protocol.js";

const WALK_SPEED = 1.5; // meters per second, matches the engine's clamp

export class KeyboardState {
  private down = new Set<string>();

  press(code: string): void {
    this.down.add(code);
  }

  release(code: string): void {
    this.down.delete(code);
  }

  /** WASD/arrow state as a forward/strafe pair in [-1, 1]. */
  axes(): [number, number] {
    let forward = 0;
    let strafe = 0;
    if (this.down.has("KeyW") || this.down.has("ArrowUp")) forward += 1;
    if (this.down.has("KeyS") || this.down.has("ArrowDown")) forward -= 1;
    if (this.down.has("KeyD") || this.down.has("ArrowRight")) strafe += 1;
    if (this.down.has("KeyA") || this.down.has("ArrowLeft")) strafe -= 1;
    return [forward, strafe];
  }
}

/** Move input for one frame, yaw-relative, clamped to walking speed. */
export function moveInput(
  keys: KeyboardState,
  yaw: number,
  dt: number,
): EngineInput | null {
  const [forward, strafe] = keys.axes();
  if (!forward && !strafe) return null;
  const norm = Math.hypot(forward, strafe);
  const speed = (WALK_SPEED * dt) / norm;
  const sin = Math.sin(yaw);
  const cos = Math.cos(yaw);
  // forward is -z when yaw is 0, matching the camera's facing direction
  const dx = (strafe * cos - forward * sin) * speed;
  const dz = (-forward * cos - strafe * sin) * speed;
  return { move: [round6(dx), round6(dz)] };
}

/** Pointer ray through a screen position, in world space. */
export function pointerInput(
  camera: THREE.Camera,
  ndcX: number,
  ndcY: number,
  action: "click" | "hover" = "click",
): EngineInput {
  const origin = new THREE.Vector3();
  camera.getWorldPosition(origin);
  const target = new THREE.Vector3(ndcX, ndcY, 0.5).unproject(camera);
  const direction = target.sub(origin).normalize();
  return {
    pointer: {
      origin: [round6(origin.x), round6(origin.y), round6(origin.z)],
      direction: [round6(direction.x), round6(direction.y), round6(direction.z)],
      action,
    },
  };
}

/** Controller ray straight from a grip pose. */
export function controllerRayInput(
  grip: THREE.Object3D,
  action: "click" | "hover" = "click",
): EngineInput {
  const origin = new THREE.Vector3();
  grip.getWorldPosition(origin);
  const direction = new THREE.Vector3(0, 0, -1)
    .applyQuaternion(grip.getWorldQuaternion(new THREE.Quaternion()))
    .normalize();
  return {
    pointer: {
      origin: [round6(origin.x), round6(origin.y), round6(origin.z)],
      direction: [round6(direction.x), round6(direction.y), round6(direction.z)],
      action,
    },
  };
}

function round6(v: number): number {
  return Math.round(v * 1e6) / 1e6;
}
