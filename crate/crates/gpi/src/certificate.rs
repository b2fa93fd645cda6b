//! JSON certificates. Keys are emitted sorted and no timestamps are recorded,
//! so identical inputs give identical bytes.

use std::fs;
use std::io::Write;
use std::path::Path;

use gpi_core::identities::ENUMERATION_ORDER_VERSION;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u64 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    fields: Map<String, Value>,
}

impl Certificate {
    pub fn new(command: &str, inputs: Value, seed: u64) -> Self {
        let mut fields = Map::new();
        fields.insert("schema_version".into(), SCHEMA_VERSION.into());
        fields.insert("command".into(), command.into());
        fields.insert("inputs".into(), inputs);
        fields.insert("seed".into(), seed.into());
        fields.insert("order_version".into(), ENUMERATION_ORDER_VERSION.into());
        fields.insert("tool_version".into(), TOOL_VERSION.into());
        Self { fields }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.into(), value.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.get(key)
    }

    pub fn to_value(&self) -> Value {
        Value::Object(self.fields.clone())
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.fields).expect("certificate serializes");
        s.push('\n');
        s
    }

    /// Writes through a temporary file in the same directory, then renames.
    pub fn write_atomic(&self, path: &Path) -> std::io::Result<()> {
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "certificate".into());
        let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(self.render().as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_sorted_and_stable() {
        let mut c = Certificate::new("identities", json!({"sig": "0,0", "algebra": "field"}), 7);
        c.set("dims", json!([1, 1]));
        let text = c.render();
        let keys: Vec<&str> = text.lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(text, c.clone().render());
    }

    #[test]
    fn atomic_write() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cert.json");
        let c = Certificate::new("regularity", json!({}), 0);
        c.write_atomic(&path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), c.render());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
