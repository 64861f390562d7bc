// Redaction mode hashes user ids everywhere they are displayed, mirroring
// how screenshots of real data get anonymised.

export function redactUser(label: string): string {
  let hash = 0x811c9dc5;
  for (let i = 0; i < label.length; i++) {
    hash ^= label.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193) >>> 0;
  }
  return `user-${hash.toString(16).padStart(8, "0")}`;
}

export function displayUser(label: string, redacted: boolean): string {
  return redacted ? redactUser(label) : label;
}
