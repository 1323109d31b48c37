export class MissingFile extends Error {
  constructor(path: string) {
    super(`missing input file: ${path}`);
    this.name = "MissingFile";
  }
}

export class SchemaMismatch extends Error {
  constructor(detail: string) {
    super(detail);
    this.name = "SchemaMismatch";
  }
}
