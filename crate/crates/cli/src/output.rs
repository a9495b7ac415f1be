use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Tsv,
    Jsonl,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Tsv => "tsv",
            Format::Jsonl => "jsonl",
        }
    }
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let mut f = File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// How an artifact names its manifest on its first line.
#[derive(Debug, Clone, Copy)]
pub enum Header {
    Hash,
    Xml,
}

/// Drop leading `# manifest:` lines so a text artifact can be re-read by
/// the library parsers.
pub fn strip_manifest_line(text: &str) -> &str {
    let mut rest = text;
    while rest.starts_with("# manifest:") {
        rest = rest.split_once('\n').map_or("", |(_, r)| r);
    }
    rest
}

fn tsv_cell(v: &Value) -> String {
    let s = match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(xs) => xs.iter().map(tsv_cell).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    };
    s.chars().map(|c| if c == '\t' || c == '\n' || c == '\r' { ' ' } else { c }).collect()
}

/// Streaming tabular artifact in the run's format.
pub struct TableWriter {
    out: BufWriter<File>,
    columns: Vec<String>,
    format: Format,
}

impl TableWriter {
    pub fn row(&mut self, values: Vec<Value>) -> CliResult<()> {
        debug_assert_eq!(values.len(), self.columns.len());
        match self.format {
            Format::Tsv => {
                let cells: Vec<String> = values.iter().map(tsv_cell).collect();
                writeln!(self.out, "{}", cells.join("\t"))?;
            }
            Format::Jsonl => {
                let obj: Map<String, Value> = self.columns.iter().cloned().zip(values).collect();
                writeln!(self.out, "{}", Value::Object(obj))?;
            }
        }
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.out.flush()?;
        Ok(())
    }
}

/// Bookkeeping for one invocation: resolved settings, input and output
/// digests and a summary, written as `manifest-<command>.json` at the end.
pub struct Run {
    pub command: String,
    pub out_dir: PathBuf,
    pub format: Format,
    pub seed: Option<u64>,
    settings: BTreeMap<String, String>,
    inputs: BTreeMap<String, String>,
    input_paths: Vec<PathBuf>,
    outputs: Vec<(String, PathBuf)>,
    summary: Map<String, Value>,
}

impl Run {
    pub fn new(command: &str, out_dir: PathBuf, format: Format, seed: Option<u64>) -> CliResult<Self> {
        std::fs::create_dir_all(&out_dir)
            .map_err(|e| CliError::Config(format!("cannot create output directory {}: {e}", out_dir.display())))?;
        let mut run = Run {
            command: command.to_owned(),
            out_dir,
            format,
            seed,
            settings: BTreeMap::new(),
            inputs: BTreeMap::new(),
            input_paths: Vec::new(),
            outputs: Vec::new(),
            summary: Map::new(),
        };
        run.setting("format", format.extension());
        if let Some(s) = seed {
            run.setting("seed", s);
        }
        Ok(run)
    }

    pub fn manifest_name(&self) -> String {
        format!("manifest-{}.json", self.command)
    }

    pub fn setting(&mut self, key: &str, value: impl ToString) {
        self.settings.insert(key.to_owned(), value.to_string());
    }

    pub fn summary(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(key.to_owned(), serde_json::to_value(value).expect("summary values serialize"));
    }

    pub fn require_seed(&self) -> CliResult<u64> {
        self.seed.ok_or_else(|| {
            CliError::Config(format!("{} is stochastic: pass --seed or set seed in the config file", self.command))
        })
    }

    /// Record an input file and its digest.
    pub fn input(&mut self, path: &Path) -> CliResult<PathBuf> {
        if !path.is_file() {
            return Err(CliError::Data(format!("input file {} does not exist", path.display())));
        }
        let digest = sha256_file(path)?;
        self.inputs.insert(path.display().to_string(), digest);
        self.input_paths.push(path.canonicalize()?);
        Ok(path.to_path_buf())
    }

    pub fn read_input(&mut self, path: &Path) -> CliResult<String> {
        self.input(path)?;
        std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }

    fn output_path(&mut self, file_name: &str) -> CliResult<PathBuf> {
        let path = self.out_dir.join(file_name);
        if let Ok(canon) = path.canonicalize() {
            if self.input_paths.contains(&canon) {
                return Err(CliError::Config(format!("output {} would overwrite an input", path.display())));
            }
        }
        self.outputs.push((file_name.to_owned(), path.clone()));
        Ok(path)
    }

    pub fn table(&mut self, stem: &str, columns: &[&str]) -> CliResult<TableWriter> {
        let path = self.output_path(&format!("{stem}.{}", self.format.extension()))?;
        let mut out = BufWriter::new(File::create(&path)?);
        let manifest = self.manifest_name();
        match self.format {
            Format::Tsv => {
                writeln!(out, "# manifest: {manifest}")?;
                writeln!(out, "{}", columns.join("\t"))?;
            }
            Format::Jsonl => writeln!(out, "{}", json!({ "_manifest": manifest }))?,
        }
        Ok(TableWriter { out, columns: columns.iter().map(|c| c.to_string()).collect(), format: self.format })
    }

    pub fn write_table(&mut self, stem: &str, columns: &[&str], rows: impl IntoIterator<Item = Vec<Value>>) -> CliResult<()> {
        let mut w = self.table(stem, columns)?;
        for r in rows {
            w.row(r)?;
        }
        w.finish()
    }

    /// Line-oriented JSON corpus artifact opened by a provenance record.
    pub fn jsonl(&mut self, file_name: &str) -> CliResult<BufWriter<File>> {
        let path = self.output_path(file_name)?;
        let mut out = BufWriter::new(File::create(&path)?);
        writeln!(out, "{}", json!({ "_manifest": self.manifest_name() }))?;
        Ok(out)
    }

    pub fn write_text(&mut self, file_name: &str, header: Header, body: &str) -> CliResult<()> {
        let path = self.output_path(file_name)?;
        let line = match header {
            Header::Hash => format!("# manifest: {}\n", self.manifest_name()),
            Header::Xml => format!("<!-- manifest: {} -->\n", self.manifest_name()),
        };
        std::fs::write(path, line + body)?;
        Ok(())
    }

    fn config_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.command.as_bytes());
        for (k, v) in &self.settings {
            h.update(format!("\n{k}={v}").as_bytes());
        }
        hex::encode(h.finalize())
    }

    /// Write the manifest and print the summary as `key: value` lines.
    pub fn finish(self) -> CliResult<()> {
        let outputs: Vec<Value> = self
            .outputs
            .iter()
            .map(|(name, path)| Ok(json!({ "file": name, "sha256": sha256_file(path)? })))
            .collect::<CliResult<_>>()?;
        let inputs: Vec<Value> = self.inputs.iter().map(|(p, d)| json!({ "path": p, "sha256": d })).collect();
        let manifest = json!({
            "manifest": self.manifest_name(),
            "tool": "moralframe",
            "version": env!("CARGO_PKG_VERSION"),
            "library_version": moralframe::VERSION,
            "command": self.command,
            "seed": self.seed,
            "config_hash": self.config_hash(),
            "settings": self.settings,
            "inputs": inputs,
            "outputs": outputs,
            "summary": self.summary,
        });
        let path = self.out_dir.join(self.manifest_name());
        std::fs::write(&path, serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n")?;
        let mut stdout = std::io::stdout().lock();
        for (k, v) in &self.summary {
            let shown = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            writeln!(stdout, "{k}: {shown}")?;
        }
        writeln!(stdout, "manifest: {}", path.display())?;
        Ok(())
    }
}

/// Rows of a TSV or JSONL table as column → text maps. The format is
/// detected from the first content line. Provenance lines are skipped, as
/// are `#` comments above the header.
pub fn parse_table(text: &str) -> CliResult<Vec<BTreeMap<String, String>>> {
    let mut header_seen = false;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| {
            let keep = !l.trim().is_empty()
                && !l.starts_with("# manifest:")
                && !l.trim_start().starts_with(moralframe::corpus::MANIFEST_RECORD)
                && (header_seen || !l.starts_with('#'));
            header_seen |= keep;
            keep
        })
        .peekable();
    let Some((_, first)) = lines.peek() else { return Ok(Vec::new()) };
    if first.trim_start().starts_with('{') {
        return lines
            .map(|(i, l)| {
                let v: Map<String, Value> =
                    serde_json::from_str(l).map_err(|e| CliError::Data(format!("line {}: {e}", i + 1)))?;
                Ok(v.into_iter().map(|(k, v)| (k, tsv_cell(&v))).collect())
            })
            .collect();
    }
    let (_, header) = lines.next().expect("peeked");
    let columns: Vec<&str> = header.split('\t').map(str::trim).collect();
    lines
        .map(|(i, l)| {
            let cells: Vec<&str> = l.split('\t').collect();
            if cells.len() != columns.len() {
                return Err(CliError::Data(format!("line {}: expected {} columns, found {}", i + 1, columns.len(), cells.len())));
            }
            Ok(columns.iter().map(|c| c.to_string()).zip(cells.into_iter().map(str::to_owned)).collect())
        })
        .collect()
}

pub fn column<'a>(row: &'a BTreeMap<String, String>, name: &str) -> CliResult<&'a str> {
    row.get(name).map(String::as_str).ok_or_else(|| CliError::Data(format!("missing column {name:?}")))
}
