import * as THREE from "three";
import { describe, expect, it } from "vitest";

import {
  KeyboardState,
  controllerRayInput,
  moveInput,
  pointerInput,
} from "../src/input.js";

function moveOf(input: ReturnType<typeof moveInput>): [number, number] {
  expect(input).not.toBeNull();
  const move = (input as { move: [number, number] }).move;
  return move;
}

describe("keyboard movement", () => {
  it("is null while no key is down", () => {
    expect(moveInput(new KeyboardState(), 0, 0.1)).toBeNull();
  });

  it("walks forward along -z at yaw zero", () => {
    const keys = new KeyboardState();
    keys.press("KeyW");
    const [dx, dz] = moveOf(moveInput(keys, 0, 0.1));
    expect(dx).toBeCloseTo(0, 6);
    expect(dz).toBeCloseTo(-0.15, 6);
  });

  it("clamps diagonals to walking speed", () => {
    const keys = new KeyboardState();
    keys.press("KeyW");
    keys.press("KeyD");
    const [dx, dz] = moveOf(moveInput(keys, 0, 0.1));
    expect(Math.hypot(dx, dz)).toBeCloseTo(0.15, 5);
  });

  it("rotates with the camera yaw", () => {
    const keys = new KeyboardState();
    keys.press("ArrowUp");
    const [dx, dz] = moveOf(moveInput(keys, Math.PI / 2, 0.1));
    expect(dx).toBeCloseTo(-0.15, 6);
    expect(dz).toBeCloseTo(0, 6);
  });

  it("cancels opposing keys", () => {
    const keys = new KeyboardState();
    keys.press("KeyW");
    keys.press("KeyS");
    expect(moveInput(keys, 0, 0.1)).toBeNull();
    keys.release("KeyS");
    expect(moveInput(keys, 0, 0.1)).not.toBeNull();
  });
});

describe("pointer rays", () => {
  it("shoots through the screen center along the view axis", () => {
    const camera = new THREE.PerspectiveCamera(70, 1, 0.05, 100);
    camera.position.set(0, 1.6, 0);
    camera.updateMatrixWorld();
    const input = pointerInput(camera, 0, 0, "click");
    if (!("pointer" in input)) throw new Error("expected a pointer input");
    expect(input.pointer.origin).toEqual([0, 1.6, 0]);
    expect(input.pointer.direction[0]).toBeCloseTo(0, 6);
    expect(input.pointer.direction[1]).toBeCloseTo(0, 6);
    expect(input.pointer.direction[2]).toBeCloseTo(-1, 6);
    expect(input.pointer.action).toBe("click");
  });

  it("tilts with off-center screen positions", () => {
    const camera = new THREE.PerspectiveCamera(70, 1, 0.05, 100);
    camera.updateMatrixWorld();
    const input = pointerInput(camera, 0.5, 0, "hover");
    if (!("pointer" in input)) throw new Error("expected a pointer input");
    expect(input.pointer.direction[0]).toBeGreaterThan(0);
    expect(input.pointer.action).toBe("hover");
  });
});

describe("controller rays", () => {
  it("follows the grip orientation", () => {
    const grip = new THREE.Object3D();
    grip.position.set(1, 1.2, 1);
    grip.rotation.set(0, Math.PI / 2, 0);
    grip.updateMatrixWorld();
    const input = controllerRayInput(grip);
    if (!("pointer" in input)) throw new Error("expected a pointer input");
    expect(input.pointer.origin).toEqual([1, 1.2, 1]);
    expect(input.pointer.direction[0]).toBeCloseTo(-1, 6);
    expect(input.pointer.direction[1]).toBeCloseTo(0, 6);
    expect(input.pointer.direction[2]).toBeCloseTo(0, 6);
  });
});
