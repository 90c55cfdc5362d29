use blepin::channel::ChannelError;
use blepin::sim::SimError;
use thiserror::Error;

pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const IO: i32 = 3;
    pub const DEGENERATE: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Degenerate(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit_code::USAGE,
            CliError::Io { .. } => exit_code::IO,
            CliError::Degenerate(_) => exit_code::DEGENERATE,
        }
    }
}

impl From<ChannelError> for CliError {
    fn from(e: ChannelError) -> Self {
        match e {
            ChannelError::DegenerateInput(_) => CliError::Degenerate(e.to_string()),
            ChannelError::Io(ref msg) => CliError::Io {
                context: "reading measurements".into(),
                source: std::io::Error::other(msg.clone()),
            },
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Channel(c) => c.into(),
            SimError::Io(source) => CliError::io("writing output", source),
            other => CliError::Usage(other.to_string()),
        }
    }
}
