//! Plain `key = value` run configuration.

use quantiso::{Error, Result};
use std::collections::BTreeMap;

#[derive(Clone, Debug, Default)]
pub struct Config {
    pub entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Parse(format!(
                    "config line {} is not `key = value`: {raw:?}",
                    lineno + 1
                )));
            };
            entries.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn get_parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::Parse(format!("bad value for {key}: {v:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_lookup() {
        let c = Config::parse("L = 16\ncells=128 # comment\n\n# full comment\nn = 0.05\n").unwrap();
        assert_eq!(c.get("L"), Some("16"));
        assert_eq!(c.get_parse::<usize>("cells").unwrap(), Some(128));
        assert_eq!(c.get_parse::<f64>("n").unwrap(), Some(0.05));
        assert!(c.get("missing").is_none());
        assert!(Config::parse("not a pair").is_err());
    }
}
