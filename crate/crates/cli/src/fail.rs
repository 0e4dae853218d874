use std::fmt;
use std::path::Path;
use std::process::ExitCode;

use semiconf::Error;

/// Process exit status: 0 success, 1 identity failure, 2 domain or math
/// error, 3 input error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Code {
    IdentityFailure = 1,
    Domain = 2,
    Input = 3,
}

impl From<Code> for ExitCode {
    fn from(c: Code) -> Self {
        ExitCode::from(c as u8)
    }
}

#[derive(Debug)]
pub struct Fail {
    pub code: Code,
    pub msg: String,
}

impl Fail {
    pub fn input(msg: impl fmt::Display) -> Self {
        Fail {
            code: Code::Input,
            msg: msg.to_string(),
        }
    }

    pub fn domain(msg: impl fmt::Display) -> Self {
        Fail {
            code: Code::Domain,
            msg: msg.to_string(),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Fail::input(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for Fail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::InvalidInput(_) | Error::UnknownFamily(_) | Error::ModeMismatch { .. } => {
                Fail::input(e)
            }
            _ => Fail::domain(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_errors_map_to_stable_codes() {
        assert_eq!(Fail::from(Error::DegenerateData("x".into())).code, Code::Domain);
        assert_eq!(Fail::from(Error::OnAxis { x: 0.0, y: 0.0, z: 0.0 }).code, Code::Domain);
        assert_eq!(Fail::from(Error::Degenerate).code, Code::Domain);
        assert_eq!(Fail::from(Error::Parse("x".into())).code, Code::Input);
        assert_eq!(Fail::from(Error::UnknownFamily("x".into())).code, Code::Input);
    }
}
