/**
 * Bridges to the engine.
 *
 * The session never calls the engine directly; it talks to an
 * EngineBridge. In production that is a message channel to wherever the
 * engine runs (a worker, a local process behind a socket). In tests and
 * replay mode it is a transcript recorded by the engine's own CLI, which
 * doubles as proof that the viewer forwards inputs without inventing any.
 */

import { EngineInput, FrameReport, parseFrameReport } from "./protocol.js";

export interface BootInfo {
  scene: string;
}

export interface EngineBridge {
  boot(sceneUrl: string): Promise<BootInfo>;
  step(dt: number, inputs: EngineInput[]): Promise<FrameReport>;
}

export interface TranscriptFrame {
  inputs: EngineInput[];
  report: unknown;
}

export interface Transcript {
  scene: string;
  dt: number;
  frames: TranscriptFrame[];
}

export class TranscriptMismatch extends Error {}

/**
 * Replays a recorded engine run. Every step must match the recorded
 * inputs exactly; a viewer that mutates, reorders, or invents inputs
 * cannot replay a transcript.
 */
export class TranscriptBridge implements EngineBridge {
  private cursor = 0;

  constructor(private transcript: Transcript) {}

  get exhausted(): boolean {
    return this.cursor >= this.transcript.frames.length;
  }

  async boot(sceneUrl: string): Promise<BootInfo> {
    if (!sceneUrl.endsWith(this.transcript.scene)) {
      throw new TranscriptMismatch(
        `transcript is for ${this.transcript.scene}, not ${sceneUrl}`,
      );
    }
    this.cursor = 0;
    return { scene: this.transcript.scene };
  }

  async step(dt: number, inputs: EngineInput[]): Promise<FrameReport> {
    const frame = this.transcript.frames[this.cursor];
    if (!frame) {
      throw new TranscriptMismatch(`no frame ${this.cursor} in transcript`);
    }
    if (Math.abs(dt - this.transcript.dt) > 1e-9) {
      throw new TranscriptMismatch(`dt ${dt} != recorded ${this.transcript.dt}`);
    }
    const got = JSON.stringify(inputs);
    const want = JSON.stringify(frame.inputs);
    if (got !== want) {
      throw new TranscriptMismatch(
        `frame ${this.cursor}: inputs ${got} != recorded ${want}`,
      );
    }
    this.cursor += 1;
    return parseFrameReport(frame.report);
  }
}

interface PortLike {
  postMessage(data: unknown): void;
  addEventListener(type: "message", fn: (ev: { data: unknown }) => void): void;
}

interface RpcReply {
  id: number;
  ok: boolean;
  result?: unknown;
  error?: string;
}

/**
 * Engine reached over a message port (worker or iframe). The wire format
 * is {id, kind, ...args} out and {id, ok, result|error} back.
 */
export class ChannelBridge implements EngineBridge {
  private nextId = 1;
  private pending = new Map<number, [(v: unknown) => void, (e: Error) => void]>();

  constructor(private port: PortLike) {
    port.addEventListener("message", (ev) => {
      const msg = ev.data as RpcReply;
      const entry = this.pending.get(msg.id);
      if (!entry) return;
      this.pending.delete(msg.id);
      if (msg.ok) entry[0](msg.result);
      else entry[1](new Error(msg.error ?? "engine error"));
    });
  }

  private call(kind: string, args: Record<string, unknown>): Promise<unknown> {
    const id = this.nextId++;
    return new Promise((resolve, reject) => {
      this.pending.set(id, [resolve, reject]);
      this.port.postMessage({ id, kind, ...args });
    });
  }

  async boot(sceneUrl: string): Promise<BootInfo> {
    return (await this.call("boot", { scene: sceneUrl })) as BootInfo;
  }

  async step(dt: number, inputs: EngineInput[]): Promise<FrameReport> {
    return parseFrameReport(await this.call("step", { dt, inputs }));
  }
}
