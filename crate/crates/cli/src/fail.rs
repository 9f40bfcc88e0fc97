use std::fmt;

use coalition_var::Error;

/// A command failure carrying its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub type CmdResult<T = ()> = Result<T, Failure>;

pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_LIMIT: u8 = 3;
pub const EXIT_SAMPLES: u8 = 4;

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Failure {
        Failure::new(EXIT_INPUT, message)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::GameTooLargeForExact { .. } | Error::TooManyPlayers { .. } => EXIT_LIMIT,
            Error::InsufficientSamples(_) => EXIT_SAMPLES,
            _ => EXIT_INPUT,
        };
        let mut message = e.to_string();
        if code == EXIT_LIMIT {
            message.push_str(" (try `coalition-var sample`)");
        }
        Failure::new(code, message)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::input(e.to_string())
    }
}
