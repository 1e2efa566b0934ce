use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid bounding box: {0}")]
    InvalidBox(String),

    #[error("invalid screenshot: {0}")]
    InvalidScreenshot(String),

    #[error("unknown dark pattern category `{0}`")]
    UnknownCategory(String),

    #[error("unknown icon class `{0}`")]
    UnknownIconClass(String),

    /// A document failed to decode; `path` is the JSON field path of the
    /// offending value (empty for top-level syntax errors).
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("duplicate segment id `{0}`")]
    DuplicateSegmentId(String),

    #[error("rule file line {line}: {message}")]
    Rule { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("template `{name}` does not fit: {message}")]
    TemplateFit { name: String, message: String },

    #[error("invalid template `{name}`: {message}")]
    Template { name: String, message: String },

    #[error("OCR backend failed ({status}): {stderr}")]
    Backend { status: String, stderr: String },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// Decodes a JSON document, reporting the field path of the first failure.
pub(crate) fn decode_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        Error::schema(if path == "." { String::new() } else { path }, err.inner().to_string())
    })
}
