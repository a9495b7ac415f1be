pub mod analyze;
pub mod corpus;
pub mod label;
pub mod report;
pub mod topics;
pub mod train;

use std::collections::HashSet;
use std::fs::File;
use std::path::{Path, PathBuf};

use moralframe::corpus::{parse_word_list, Document, DocumentReader, DEFAULT_STOPWORDS};
use moralframe::learn::EmbeddingTable;
use moralframe::lexicon::{parse_lexicon, FrameLexicon, SEED_LEXICON};

use crate::error::CliResult;
use crate::output::Run;
use crate::Context;

/// Streaming documents from a recorded input.
pub fn documents(run: &mut Run, path: &Path) -> CliResult<DocumentReader<File>> {
    run.input(path)?;
    Ok(DocumentReader::new(File::open(path)?))
}

pub fn all_documents(run: &mut Run, path: &Path) -> CliResult<Vec<Document>> {
    Ok(documents(run, path)?.collect::<Result<Vec<_>, _>>()?)
}

pub fn frame_lexicon(ctx: &Context, run: &mut Run, flag: &Option<PathBuf>) -> CliResult<FrameLexicon> {
    let text = match ctx.optional_path(flag, "paths.lexicon") {
        Some(p) => {
            run.setting("lexicon", p.display());
            run.read_input(&p)?
        }
        None => {
            run.setting("lexicon", "builtin-seed");
            SEED_LEXICON.to_owned()
        }
    };
    let lex = parse_lexicon(&text)?;
    let missing = lex.missing_frames();
    if !missing.is_empty() {
        log::warn!("lexicon has no terms for {} frame(s)", missing.len());
    }
    Ok(lex)
}

pub fn stopwords(ctx: &Context, run: &mut Run, flag: &Option<PathBuf>) -> CliResult<HashSet<String>> {
    let text = match ctx.optional_path(flag, "paths.stopwords") {
        Some(p) => {
            run.setting("stopwords", p.display());
            run.read_input(&p)?
        }
        None => DEFAULT_STOPWORDS.to_owned(),
    };
    Ok(parse_word_list(&text).into_iter().collect())
}

pub fn embeddings(ctx: &Context, run: &mut Run, flag: &Option<PathBuf>) -> CliResult<EmbeddingTable<f64>> {
    let path = ctx.path(flag, "paths.embeddings", "--embeddings")?;
    run.setting("embeddings", path.display());
    run.input(&path)?;
    Ok(EmbeddingTable::load(&path)?)
}
