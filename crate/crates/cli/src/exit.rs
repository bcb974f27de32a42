use std::fmt::Display;

pub const ASSERTION: u8 = 1;
pub const PARSE: u8 = 2;
pub const INTERNAL: u8 = 3;
pub const PRECONDITION: u8 = 4;

/// An error together with the process exit code it maps to.
#[derive(Debug)]
pub struct Fail {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Fail {
    pub fn new(code: u8, msg: impl Display) -> Self {
        Self {
            code,
            error: anyhow::anyhow!("{msg}"),
        }
    }
}

pub trait ResultExt<T> {
    fn code(self, code: u8) -> Result<T, Fail>;
}

impl<T, E: Into<anyhow::Error>> ResultExt<T> for Result<T, E> {
    fn code(self, code: u8) -> Result<T, Fail> {
        self.map_err(|e| Fail { code, error: e.into() })
    }
}
