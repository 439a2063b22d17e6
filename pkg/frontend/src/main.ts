// Demo entry point. The page names the service in a meta tag because
// document.currentScript is null inside module scripts.
import { startOverlay } from "./overlay.js";
import { defaultConfig } from "./types.js";

const meta = document.querySelector<HTMLMetaElement>('meta[name="overlay-service"]');
const serviceUrl = meta?.content ?? "http://127.0.0.1:8000";
startOverlay(document, defaultConfig(serviceUrl));
