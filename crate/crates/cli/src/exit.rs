use std::path::Path;

use anyhow::Context;

pub const INTERNAL: u8 = 1;
pub const INPUT: u8 = 2;
pub const DEGENERATE: u8 = 3;

/// An error together with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

pub type Outcome = Result<(), Failure>;

pub trait WithCode<T> {
    fn code(self, code: u8) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> WithCode<T> for Result<T, E> {
    fn code(self, code: u8) -> Result<T, Failure> {
        self.map_err(|e| Failure { code, error: e.into() })
    }
}

pub fn read_input(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).code(INPUT)
}

pub fn write_output(path: &Path, contents: &str) -> Outcome {
    std::fs::write(path, contents).with_context(|| format!("cannot write {}", path.display())).code(INTERNAL)
}
