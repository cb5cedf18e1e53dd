use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

/// Schema or validation failure, located by a JSON field path such as
/// `cut_layers[3]`.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{path}: {message}")]
pub struct JsonError {
    pub path: String,
    pub message: String,
}

impl JsonError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// Deserializes `text`, reporting the path of the first offending field.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, JsonError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { "$".to_string() } else { path };
        JsonError::new(path, e.into_inner().to_string())
    })
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, Deserialize)]
    #[serde(deny_unknown_fields)]
    #[allow(dead_code)]
    struct Doc {
        values: Vec<u32>,
        name: String,
    }

    #[test]
    fn error_paths_name_the_field() {
        let e = from_json::<Doc>(r#"{"values": [1, "x"], "name": "a"}"#).unwrap_err();
        assert_eq!(e.path, "values[1]");
        let e = from_json::<Doc>(r#"{"values": []}"#).unwrap_err();
        assert!(e.message.contains("name"), "{e}");
    }
}
