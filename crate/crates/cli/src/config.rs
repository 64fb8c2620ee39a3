use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

/// Keys a config file may set; each matches a long flag name.
pub const KEYS: &[&str] = &[
    "squeezing",
    "nbar",
    "time",
    "n-tau",
    "grid-extent",
    "grid-res",
    "state",
    "out",
    "format",
];

/// Flat `key = value` defaults. Blank lines and `#` comments are skipped;
/// underscores in keys are read as dashes.
#[derive(Debug, Default, Clone)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            let key = key.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(format!("line {}: unknown key '{key}'", i + 1));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// The flag value if given, otherwise the parsed config entry.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|e| CliError::Usage(format!("config key '{key}': {e}")))
            })
            .transpose()
    }

    pub fn require<T>(&self, flag: Option<T>, key: &str) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.pick(flag, key)?
            .ok_or_else(|| CliError::Usage(format!("missing --{key} (flag or config entry)")))
    }
}

/// `start:stop:steps` or a single value. Points are evenly spaced with
/// both ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| if k + 1 == self.steps { self.stop } else { self.start + h * k as f64 })
            .collect()
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| -> Result<f64, String> {
            let x: f64 = t.trim().parse().map_err(|_| format!("bad number '{t}' in range '{s}'"))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(format!("non-finite value in range '{s}'"))
            }
        };
        let parts: Vec<&str> = s.split(':').collect();
        let range = match parts.as_slice() {
            [x] => {
                let x = num(x)?;
                Range { start: x, stop: x, steps: 1 }
            }
            [a, b, n] => {
                let steps = n
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad step count '{n}' in range '{s}'"))?;
                Range { start: num(a)?, stop: num(b)?, steps }
            }
            _ => return Err(format!("range '{s}' must be a value or start:stop:steps")),
        };
        if range.steps == 0 {
            return Err(format!("range '{s}' is empty"));
        }
        if range.stop < range.start {
            return Err(format!("range '{s}' has stop below start"));
        }
        if range.steps == 1 && range.stop != range.start {
            return Err(format!("range '{s}' has one step but distinct ends"));
        }
        Ok(range)
    }
}
