/**
 * Browser entry point.
 *
 * Two ways to run:
 *   ?scene=/apartment.html&engine=worker.js  — live engine over a worker
 *   ?scene=/apartment.html&replay=run.json   — replay a recorded transcript
 *
 * Desktop fallback is always on (mouse ray + WASD); WebXR is offered when
 * the browser exposes it.
 */

import * as THREE from "three";

import {
  ChannelBridge,
  EngineBridge,
  Transcript,
  TranscriptBridge,
} from "./engine-client.js";
import { KeyboardState, moveInput, pointerInput } from "./input.js";
import { EngineInput } from "./protocol.js";
import { ViewerSession } from "./session.js";

interface Drive {
  bridge: EngineBridge;
  /** Recorded per-frame inputs to feed back, or null for live input. */
  replayInputs: EngineInput[][] | null;
}

async function pickBridge(params: URLSearchParams): Promise<Drive> {
  const replay = params.get("replay");
  if (replay) {
    const transcript = (await (await fetch(replay)).json()) as Transcript;
    // Boot consumes the first recorded frame, the loop replays the rest.
    const replayInputs = transcript.frames
      .slice(1)
      .map((f) => f.inputs as EngineInput[]);
    return { bridge: new TranscriptBridge(transcript), replayInputs };
  }
  const engineUrl = params.get("engine");
  if (!engineUrl) {
    throw new Error("no engine: pass ?engine=<worker.js> or ?replay=<trace.json>");
  }
  const worker = new Worker(engineUrl, { type: "module" });
  return { bridge: new ChannelBridge(worker), replayInputs: null };
}

async function run(): Promise<void> {
  const params = new URLSearchParams(location.search);
  const sceneUrl = params.get("scene") ?? "/index.html";

  const renderer = new THREE.WebGLRenderer({ antialias: true });
  renderer.setSize(innerWidth, innerHeight);
  renderer.xr.enabled = true;
  document.body.appendChild(renderer.domElement);

  const camera = new THREE.PerspectiveCamera(70, innerWidth / innerHeight, 0.05, 100);
  camera.position.set(0, 1.6, 0);

  const { bridge, replayInputs } = await pickBridge(params);
  const session = await ViewerSession.boot(sceneUrl, bridge, {
    fetchText: async (url) => (await fetch(url)).text(),
    onNavigate: (href) => {
      location.href = `${location.pathname}?scene=${encodeURIComponent(href)}`;
    },
  });
  session.graph.rig.add(camera);
  session.graph.scene.add(new THREE.AmbientLight(0xffffff, 1.0));

  const pending: EngineInput[] = [];
  const keys = new KeyboardState();
  addEventListener("keydown", (e) => keys.press(e.code));
  addEventListener("keyup", (e) => keys.release(e.code));

  let yaw = 0;
  addEventListener("mousemove", (e) => {
    if (document.pointerLockElement) {
      yaw -= e.movementX * 0.002;
      camera.rotation.set(0, yaw, 0);
    }
  });
  renderer.domElement.addEventListener("click", (e) => {
    if (!document.pointerLockElement) {
      renderer.domElement.requestPointerLock();
      return;
    }
    const ndcX = (e.clientX / innerWidth) * 2 - 1;
    const ndcY = -(e.clientY / innerHeight) * 2 + 1;
    pending.push(pointerInput(camera, ndcX, ndcY, "click"));
  });

  let stepping = false;
  const clock = new THREE.Clock();

  renderer.setAnimationLoop(() => {
    renderer.render(session.graph.scene, camera);
    const dt = clock.getDelta();
    const move = moveInput(keys, yaw, dt);
    if (move) pending.push(move);
    if (!stepping) {
      const batch = replayInputs ? replayInputs.shift() : pending.splice(0);
      if (batch === undefined) return; // replay finished, keep rendering
      stepping = true;
      session
        .step(batch)
        .catch((err) => console.error(err))
        .finally(() => {
          stepping = false;
        });
    }
  });
}

run().catch((err) => {
  console.error(err);
  const pre = document.createElement("pre");
  pre.textContent = String(err);
  document.body.appendChild(pre);
});
