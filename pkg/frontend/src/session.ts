/**
 * The viewer session: scene document + render graph + engine bridge.
 *
 * All game behavior comes back from the engine as frame reports; the
 * session's whole job is to forward inputs and make the render graph
 * agree with the latest report. It keeps a state trace so a headless
 * replay can be compared against the engine's own record.
 */

import { EngineBridge } from "./engine-client.js";
import { EngineInput, FrameReport } from "./protocol.js";
import {
  RenderGraph,
  buildRenderGraph,
  documentIds,
  graphIds,
  moveRig,
  setVisibility,
} from "./render-three.js";
import { SceneDoc, readScene } from "./scene.js";

export interface SessionHooks {
  /** How to fetch scene text; fetch() in the browser, fs in tests. */
  fetchText(url: string): Promise<string>;
  onNavigate?(href: string): void;
}

export class ViewerSession {
  readonly stateTrace: string[][] = [];
  readonly reports: FrameReport[] = [];
  clockDisplay: string | null = null;
  panelText = new Map<string, string>();
  navigations: string[] = [];

  private constructor(
    readonly sceneUrl: string,
    readonly doc: SceneDoc,
    readonly graph: RenderGraph,
    private bridge: EngineBridge,
    private hooks: SessionHooks,
    readonly dt: number,
  ) {}

  /** Load the scene, mirror it, and announce the world on frame one. */
  static async boot(
    sceneUrl: string,
    bridge: EngineBridge,
    hooks: SessionHooks,
    dt = 0.1,
  ): Promise<ViewerSession> {
    const text = await hooks.fetchText(sceneUrl);
    const doc = readScene(text);
    const graph = buildRenderGraph(doc);
    await bridge.boot(sceneUrl);
    const session = new ViewerSession(sceneUrl, doc, graph, bridge, hooks, dt);
    await session.step([{ emit: "loaded" }]);
    return session;
  }

  /** Render graph ids must cover every named entity in the document. */
  mirrorsDocument(): boolean {
    const want = documentIds(this.doc);
    const have = graphIds(this.graph);
    for (const id of want) {
      if (!have.has(id)) return false;
    }
    return true;
  }

  async step(inputs: EngineInput[] = []): Promise<FrameReport> {
    const report = await this.bridge.step(this.dt, inputs);
    this.applyReport(report);
    return report;
  }

  applyReport(report: FrameReport): void {
    this.reports.push(report);
    for (const [id, visible] of Object.entries(report.visibility)) {
      setVisibility(this.graph, id, visible);
    }
    for (const [slot, text] of Object.entries(report.updates)) {
      this.panelText.set(slot, text);
    }
    if (report.clock) {
      this.clockDisplay = report.clock.display;
    }
    if (report.player) {
      moveRig(this.graph, report.player, report.yaw);
    }
    if (report.state_changed) {
      this.stateTrace.push([...report.state]);
    }
    for (const event of report.events) {
      if (event.name === "navigate") {
        const href = String(event.payload.href ?? "");
        this.navigations.push(href);
        this.hooks.onNavigate?.(href);
      }
    }
  }
}
