/**
 * A thin scripting client for the nfakit automata engine.
 *
 * Automata live inside the engine's world as .mata files; this module hands
 * out integer handles to them and runs every operation through the engine's
 * command line, so no object graphs ever cross the process boundary. All
 * failures surface as catchable {@link AutomataClientError}s.
 */

import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

/** An opaque reference to one automaton managed by the client. */
export type Handle = number;

/** Outcome of a boolean language query with an optional witness word. */
export interface Verdict {
  holds: boolean;
  /** Symbol names of the witness/counterexample word, when one exists. */
  word: string[] | null;
}

export interface ClientOptions {
  /** Interpreter that runs the engine; defaults to $NFAKIT_PYTHON or python3. */
  python?: string;
  /** Directory for intermediate .mata files; defaults to a fresh temp dir. */
  workdir?: string;
  /** Per-invocation budget in milliseconds. */
  timeoutMs?: number;
}

/** Raised for engine failures, bad inputs, and freed-handle use. */
export class AutomataClientError extends Error {
  readonly exitCode: number | null;

  constructor(message: string, exitCode: number | null = null) {
    super(message);
    this.name = "AutomataClientError";
    this.exitCode = exitCode;
  }
}

interface Slot {
  file: string;
  freed: boolean;
}

export class AutomataClient {
  private readonly python: string;
  private readonly dir: string;
  private readonly ownsDir: boolean;
  private readonly timeoutMs: number;
  private readonly slots = new Map<Handle, Slot>();
  private nextHandle: Handle = 1;
  private nextFile = 0;

  constructor(options: ClientOptions = {}) {
    this.python = options.python ?? process.env.NFAKIT_PYTHON ?? "python3";
    if (options.workdir) {
      this.dir = options.workdir;
      this.ownsDir = false;
    } else {
      this.dir = fs.mkdtempSync(path.join(os.tmpdir(), "nfakit-client-"));
      this.ownsDir = true;
    }
    this.timeoutMs = options.timeoutMs ?? 120_000;
  }

  /** Engine version; the client is only supported against a matching one. */
  version(): string {
    return this.run(["--version"]).trim();
  }

  /** Compile a regular expression into a fresh automaton. */
  fromRegex(pattern: string): Handle {
    const file = this.allocateFile();
    this.run(["minterm", `regex:${pattern}`, "--out", file]);
    return this.register(file);
  }

  /** Load an automaton from .mata text (bit-vector alphabets are
   * mintermized on load). */
  loadMata(text: string): Handle {
    const input = this.allocateFile();
    fs.writeFileSync(input, text);
    const file = this.allocateFile();
    this.run(["minterm", input, "--out", file]);
    return this.register(file);
  }

  /** The automaton serialized as explicit-alphabet .mata text. */
  saveMata(handle: Handle): string {
    return fs.readFileSync(this.fileOf(handle), "utf8");
  }

  /** The automaton rendered as a DOT digraph. */
  toDot(handle: Handle): string {
    return this.run(["minterm", this.fileOf(handle), "--format", "dot"]);
  }

  concatenate(left: Handle, right: Handle): Handle {
    return this.binary("concat", left, right);
  }

  union(left: Handle, right: Handle): Handle {
    return this.binary("union", left, right);
  }

  intersection(left: Handle, right: Handle): Handle {
    return this.binary("intersection", left, right);
  }

  /** Complement over the given symbol names, or over the automaton's own
   * symbols when none are given. */
  complement(handle: Handle, alphabet?: string[]): Handle {
    const args = ["complement", this.fileOf(handle)];
    if (alphabet !== undefined) {
      args.push("--alphabet", alphabet.join(" "));
    }
    const file = this.allocateFile();
    this.run([...args, "--out", file]);
    return this.register(file);
  }

  /** Drop states that lie on no accepting run. */
  trim(handle: Handle): Handle {
    return this.unary("trim", handle);
  }

  /** Is the left language included in the right one? */
  isIncluded(left: Handle, right: Handle): Verdict {
    const out = this.run(["inclusion", this.fileOf(left), this.fileOf(right)]);
    return parseVerdict(out);
  }

  /** Is the language empty? A false verdict carries a witness word. */
  isEmpty(handle: Handle): Verdict {
    const out = this.run(["emptiness", this.fileOf(handle)]);
    return parseVerdict(out);
  }

  /** Release a handle; later use of it raises instead of crashing. */
  free(handle: Handle): void {
    const slot = this.slots.get(handle);
    if (slot === undefined || slot.freed) {
      throw new AutomataClientError(`handle ${handle} is not live`);
    }
    slot.freed = true;
    fs.rmSync(slot.file, { force: true });
  }

  /** Drop all intermediate files (when the client owns its directory). */
  dispose(): void {
    this.slots.clear();
    if (this.ownsDir) {
      fs.rmSync(this.dir, { recursive: true, force: true });
    }
  }

  private unary(operation: string, handle: Handle): Handle {
    const file = this.allocateFile();
    this.run([operation, this.fileOf(handle), "--out", file]);
    return this.register(file);
  }

  private binary(operation: string, left: Handle, right: Handle): Handle {
    const file = this.allocateFile();
    this.run([operation, this.fileOf(left), this.fileOf(right), "--out", file]);
    return this.register(file);
  }

  private register(file: string): Handle {
    const handle = this.nextHandle++;
    this.slots.set(handle, { file, freed: false });
    return handle;
  }

  private fileOf(handle: Handle): string {
    const slot = this.slots.get(handle);
    if (slot === undefined) {
      throw new AutomataClientError(`unknown handle ${handle}`);
    }
    if (slot.freed) {
      throw new AutomataClientError(`handle ${handle} was freed`);
    }
    return slot.file;
  }

  private allocateFile(): string {
    return path.join(this.dir, `aut-${this.nextFile++}.mata`);
  }

  private run(args: string[]): string {
    try {
      return execFileSync(this.python, ["-m", "nfakit", ...args], {
        encoding: "utf8",
        timeout: this.timeoutMs,
        maxBuffer: 64 * 1024 * 1024,
        stdio: ["ignore", "pipe", "pipe"],
      });
    } catch (err) {
      const failure = err as NodeJS.ErrnoException & {
        status?: number | null;
        stderr?: string;
      };
      const detail = (failure.stderr ?? "").trim() || failure.message;
      throw new AutomataClientError(
        `automata engine failed: ${detail}`,
        failure.status ?? null,
      );
    }
  }
}

function parseVerdict(output: string): Verdict {
  const lines = output.trim().split("\n");
  const holds = lines[0] === "true";
  let word: string[] | null = null;
  if (lines.length > 1) {
    const sep = lines[1].indexOf(":");
    word = lines[1]
      .slice(sep + 1)
      .split(" ")
      .filter((token) => token.length > 0);
  }
  return { word, holds };
}
