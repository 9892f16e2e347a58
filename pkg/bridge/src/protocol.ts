/**
 * Wire protocol: newline-delimited JSON, UTF-8, one message per line,
 * one request in flight per connection. Unknown fields are ignored.
 *
 *   {"kind":"sample_request","task_id":...,"encoded_io":...,"n":N,
 *    "temperature":t}        -> {"kind":"sample_response","programs":[...]}
 *   {"kind":"train_request","epochs":N,"learning_rate":lr,
 *    "records":[{"io":...,"program":...},...]}
 *                            -> {"kind":"train_ack","received":N}
 *   anything malformed       -> {"kind":"error","message":...}
 */

export interface SampleRequest {
  kind: "sample_request";
  task_id: string;
  encoded_io: string;
  n: number;
  temperature: number;
}

export interface TrainRecord {
  io: string;
  program: string;
}

export interface TrainRequest {
  kind: "train_request";
  epochs: number;
  learning_rate: number;
  records: TrainRecord[];
}

export type Request = SampleRequest | TrainRequest;

export interface SampleResponse {
  kind: "sample_response";
  programs: string[];
}

export interface TrainAck {
  kind: "train_ack";
  received: number;
}

export interface ErrorMessage {
  kind: "error";
  message: string;
}

export type Response = SampleResponse | TrainAck | ErrorMessage;

export function errorMessage(message: string): ErrorMessage {
  return { kind: "error", message };
}

/** Parse one line into a request, or an error message describing why not. */
export function parseRequest(line: string): Request | ErrorMessage {
  let value: unknown;
  try {
    value = JSON.parse(line);
  } catch (err) {
    return errorMessage(`malformed JSON: ${(err as Error).message}`);
  }
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    return errorMessage("message must be a JSON object");
  }
  const msg = value as Record<string, unknown>;
  switch (msg.kind) {
    case "sample_request": {
      if (typeof msg.encoded_io !== "string") {
        return errorMessage("sample_request needs a string encoded_io");
      }
      const n = typeof msg.n === "number" && Number.isFinite(msg.n)
        ? Math.floor(msg.n) : NaN;
      if (!(n >= 1)) {
        return errorMessage("sample_request needs n >= 1");
      }
      return {
        kind: "sample_request",
        task_id: typeof msg.task_id === "string" ? msg.task_id : "",
        encoded_io: msg.encoded_io,
        n,
        temperature:
          typeof msg.temperature === "number" ? msg.temperature : 1.0,
      };
    }
    case "train_request": {
      if (!Array.isArray(msg.records)) {
        return errorMessage("train_request needs a records array");
      }
      const records: TrainRecord[] = [];
      for (const record of msg.records) {
        if (
          typeof record !== "object" || record === null ||
          typeof (record as Record<string, unknown>).io !== "string" ||
          typeof (record as Record<string, unknown>).program !== "string"
        ) {
          return errorMessage("train_request records need io and program");
        }
        records.push({
          io: (record as Record<string, unknown>).io as string,
          program: (record as Record<string, unknown>).program as string,
        });
      }
      return {
        kind: "train_request",
        epochs: typeof msg.epochs === "number" ? msg.epochs : 1,
        learning_rate:
          typeof msg.learning_rate === "number" ? msg.learning_rate : 0,
        records,
      };
    }
    default:
      return errorMessage(`unknown message kind ${JSON.stringify(msg.kind)}`);
  }
}

export function serialize(response: Response): string {
  return JSON.stringify(response);
}
