use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;

use crate::error::{CliError, CliResult};

/// Values from an INI-style `key = value` file with `[section]` headers.
/// Keys are addressed as `section.key`; keys before any header live in
/// `general`.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
    base: PathBuf,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let ini = Ini::load_from_file(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (section, props) in ini.iter() {
            let section = section.unwrap_or("general");
            for (k, v) in props.iter() {
                values.insert(format!("{section}.{k}"), v.trim().to_owned());
            }
        }
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(ConfigFile { values, base })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|_| CliError::Config(format!("config key {key}: cannot parse {v:?}"))))
            .transpose()
    }

    /// Relative paths resolve against the config file's directory.
    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.raw(key).map(|v| {
            let p = PathBuf::from(v);
            if p.is_absolute() {
                p
            } else {
                self.base.join(p)
            }
        })
    }
}
