export class MissingFile extends Error {
    constructor(path) {
        super(`missing input file: ${path}`);
        this.name = "MissingFile";
    }
}
export class SchemaMismatch extends Error {
    constructor(detail) {
        super(detail);
        this.name = "SchemaMismatch";
    }
}
