//! Fixtures shared by the benchmarks.

use std::path::{Path, PathBuf};

use muwork_core::corpus::library_env;
use muwork_core::imp::{parse_imp, ImpProgram};
use muwork_core::rf::{parse_into, DefEnv};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// The corpus library together with the Goldbach definitions.
pub fn env() -> DefEnv {
    let dir = corpus_dir();
    let mut env = library_env(&dir).expect("corpus library loads");
    let text = std::fs::read_to_string(dir.join("goldbach.rf")).expect("goldbach.rf is readable");
    parse_into(&text, &mut env).expect("goldbach.rf parses");
    env
}

pub fn program(name: &str) -> ImpProgram {
    let path: &Path = &corpus_dir().join(name);
    parse_imp(&std::fs::read_to_string(path).expect("program is readable")).expect("program parses")
}
