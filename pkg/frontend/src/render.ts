// Thin canvas adapter: draws a Scene exactly as constructed. No decisions
// are made here.

import type { Primitive, Scene } from "./scene.js";

function drawPrimitive(ctx: CanvasRenderingContext2D, p: Primitive): void {
  switch (p.kind) {
    case "line":
      ctx.globalAlpha = p.opacity;
      ctx.strokeStyle = p.color;
      ctx.lineWidth = p.width;
      ctx.beginPath();
      ctx.moveTo(p.x1, p.y1);
      ctx.lineTo(p.x2, p.y2);
      ctx.stroke();
      break;
    case "circle":
      ctx.globalAlpha = p.opacity;
      ctx.fillStyle = p.fill;
      ctx.beginPath();
      ctx.arc(p.x, p.y, p.r, 0, 2 * Math.PI);
      ctx.fill();
      break;
    case "rect":
      ctx.globalAlpha = 1;
      ctx.fillStyle = p.fill;
      // +0.5 overdraw hides antialiasing seams between heatmap cells
      ctx.fillRect(p.x, p.y, p.w + 0.5, p.h + 0.5);
      break;
    case "poly": {
      ctx.globalAlpha = 1;
      ctx.fillStyle = p.fill;
      ctx.beginPath();
      ctx.moveTo(p.points[0] ?? 0, p.points[1] ?? 0);
      for (let i = 2; i + 1 < p.points.length; i += 2) {
        ctx.lineTo(p.points[i] as number, p.points[i + 1] as number);
      }
      ctx.closePath();
      ctx.fill();
      break;
    }
    case "text":
      ctx.globalAlpha = 1;
      ctx.fillStyle = p.fill;
      ctx.textAlign = p.align;
      ctx.font = "12px sans-serif";
      ctx.fillText(p.text, p.x, p.y);
      break;
  }
}

export function drawScene(ctx: CanvasRenderingContext2D, scene: Scene): void {
  ctx.clearRect(0, 0, scene.width, scene.height);
  for (const p of scene.prims) drawPrimitive(ctx, p);
  ctx.globalAlpha = 1;
}
